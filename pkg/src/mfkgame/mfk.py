"""Most Frequent Keyword problem: instances, cost, offline optimum, generators.

An instance is ``d`` keywords followed by ``m`` text words, all binary strings
of length ``k``.  After every text word the algorithm must report the minimal
index of the keyword that is most frequent over the *whole* text.
"""

from __future__ import annotations

import functools
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

UNANSWERED = None


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed."""


class BitString:
    """Immutable binary string.

    Stored as bytes holding 0/1 values, so ``bytes`` ordering is exactly the
    lexicographic order on binary strings (a proper prefix sorts first).
    """

    __slots__ = ("data",)

    def __init__(self, bits: bytes | str | Iterable[int]):
        if isinstance(bits, str):
            if bits.strip("01"):
                raise ValueError(f"not a binary string: {bits!r}")
            data = bits.encode("ascii").translate(_ASCII_TO_BIT)
        elif isinstance(bits, (bytes, bytearray)):
            data = bytes(bits)
        elif isinstance(bits, np.ndarray):
            data = bits.astype(np.uint8, copy=False).tobytes()
        else:
            data = bytes(int(b) for b in bits)
        if data.strip(b"\x00\x01"):
            raise ValueError("bit values must be 0 or 1")
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("BitString is immutable")

    def __reduce__(self):
        return (BitString, (self.data,))

    @classmethod
    def ones(cls, k: int) -> "BitString":
        return cls(b"\x01" * k)

    @classmethod
    def zeros(cls, k: int) -> "BitString":
        return cls(b"\x00" * k)

    @property
    def bits(self) -> np.ndarray:
        """Read-only uint8 view of the symbols."""
        return np.frombuffer(self.data, dtype=np.uint8)

    def __len__(self) -> int:
        return len(self.data)

    def __getitem__(self, i):
        return self.data[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, BitString) and self.data == other.data

    def __lt__(self, other: "BitString") -> bool:
        return self.data < other.data

    def __hash__(self) -> int:
        return hash(self.data)

    def __str__(self) -> str:
        return self.data.translate(_BIT_TO_ASCII).decode("ascii")

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 40:
            s = f"{s[:16]}...{s[-16:]} (len {len(s)})"
        return f"BitString('{s}')"


_ASCII_TO_BIT = bytes.maketrans(b"01", b"\x00\x01")
_BIT_TO_ASCII = bytes.maketrans(b"\x00\x01", b"01")


@dataclass(frozen=True)
class Instance:
    keywords: tuple[BitString, ...]
    words: tuple[BitString, ...]

    def __post_init__(self):
        object.__setattr__(self, "keywords", tuple(self.keywords))
        object.__setattr__(self, "words", tuple(self.words))
        if not self.keywords or not self.words:
            raise ValueError("need at least one keyword and one word")
        k = len(self.keywords[0])
        if k < 1:
            raise ValueError("strings must be non-empty")
        for s in self.keywords + self.words:
            if len(s) != k:
                raise ValueError(f"all strings must have length {k}, got {len(s)}")

    @property
    def d(self) -> int:
        return len(self.keywords)

    @property
    def m(self) -> int:
        return len(self.words)

    @property
    def k(self) -> int:
        return len(self.keywords[0])

    @property
    def n(self) -> int:
        return (self.m + self.d) * self.k

    @functools.cached_property
    def input_bits(self) -> np.ndarray:
        """The input variables x_1..x_n as one read-only array."""
        arr = np.frombuffer(
            b"".join(s.data for s in self.keywords + self.words), dtype=np.uint8
        )
        return arr

    def significant_indices(self) -> list[int]:
        """1-based output positions scored by the cost function."""
        return [(j + self.d) * self.k for j in range(1, self.m + 1)]


def occurrences(instance: Instance, t: BitString) -> int:
    return sum(1 for x in instance.words if x == t)


def frequency(instance: Instance, t: BitString) -> Fraction:
    if len(t) != instance.k:
        raise ValueError("string length differs from k")
    return Fraction(occurrences(instance, t), instance.m)


def offline_optimum(instance: Instance) -> int:
    """Minimal 1-based keyword index of maximal frequency, by brute-force counting."""
    counts = [occurrences(instance, s) for s in instance.keywords]
    best = max(counts)
    return counts.index(best) + 1


def cost(instance: Instance, significant_answers: Sequence[Optional[int]]) -> int:
    if len(significant_answers) != instance.m:
        raise ValueError(f"expected {instance.m} answers, got {len(significant_answers)}")
    i0 = offline_optimum(instance)
    correct = sum(1 for y in significant_answers if y is not UNANSWERED and y == i0)
    return 1 + instance.m - correct


def _distinct_strings(d: int, k: int, rng: np.random.Generator) -> list[BitString]:
    if k < 63 and d > 2**k:
        raise ValueError(f"cannot draw {d} distinct keywords of length {k}")
    if k <= 20:
        codes = rng.choice(2**k, size=d, replace=False)
        return [BitString(format(int(c), f"0{k}b")) for c in codes]
    seen: dict[bytes, BitString] = {}
    while len(seen) < d:
        s = BitString(rng.integers(0, 2, size=k, dtype=np.uint8))
        seen.setdefault(s.data, s)
    return list(seen.values())


def gen_random(
    d: int,
    m: int,
    k: int,
    seed: int,
    skew: float = 1.0,
    favor: Optional[int] = None,
    noise: float = 0.0,
) -> Instance:
    """Random instance with Zipf-like keyword popularity.

    Keyword ranked r gets weight ``r ** -skew``; rank 1 goes to ``favor``
    (1-based) when given, otherwise to keyword 1.  A ``noise`` fraction of
    words are uniform random strings that are not keywords.
    """
    if d < 1 or m < 1 or k < 1:
        raise ValueError("d, m, k must be positive")
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must be in [0, 1]")
    if favor is not None and not 1 <= favor <= d:
        raise ValueError(f"favor must be in 1..{d}")
    rng = np.random.default_rng(seed)
    keywords = _distinct_strings(d, k, rng)

    ranks = np.arange(1, d + 1, dtype=float)
    if favor is not None:
        ranks[[0, favor - 1]] = ranks[[favor - 1, 0]]
    weights = ranks**-skew
    weights /= weights.sum()

    keyset = {s.data for s in keywords}
    can_noise = k >= 63 or 2**k > d
    words = []
    for _ in range(m):
        if noise and can_noise and rng.random() < noise:
            while True:
                w = BitString(rng.integers(0, 2, size=k, dtype=np.uint8))
                if w.data not in keyset:
                    break
            words.append(w)
        else:
            words.append(keywords[rng.choice(d, p=weights)])
    return Instance(tuple(keywords), tuple(words))


@dataclass(frozen=True)
class HardInstanceSpec:
    """Two-keyword instance where a single hidden zero decides the answer.

    Case 1: the first half of the text is all ones.  Case 2: word ``z`` of the
    first half carries a zero at bit ``u``, so it matches neither keyword.
    """

    m: int
    k: int
    case: int = 2
    z: Optional[int] = None
    u: Optional[int] = None

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise ValueError("m and k must be positive")
        if self.case not in (1, 2):
            raise ValueError("case must be 1 or 2")
        if self.k % 2:
            raise ValueError("k must be even")
        if self.case == 2:
            if self.z is None or self.u is None:
                raise ValueError("case 2 requires z and u")
            if not 1 <= self.z <= self.t:
                raise ValueError(f"z must be in 1..{self.t}")
            if not 1 <= self.u <= self.k:
                raise ValueError(f"u must be in 1..{self.k}")

    @property
    def t(self) -> int:
        return self.m // 2

    @classmethod
    def adversarial(cls, m: int, k: int) -> "HardInstanceSpec":
        """Case 2 with the zero at the last bit a left-to-right reader sees."""
        return cls(m=m, k=k, case=2, z=m // 2, u=k)


def gen_hard(spec: HardInstanceSpec) -> Instance:
    k, t = spec.k, spec.t
    ones, zeros = BitString.ones(k), BitString.zeros(k)
    first = [ones] * t
    if spec.case == 2:
        bits = bytearray(ones.data)
        bits[spec.u - 1] = 0
        first[spec.z - 1] = BitString(bytes(bits))
    words = first + [zeros] * t
    if spec.m % 2:
        words.append(BitString(b"\x01" * (k // 2) + b"\x00" * (k // 2)))
    return Instance((ones, zeros), tuple(words))


def serialize(instance: Instance) -> str:
    lines = [f"{instance.d} {instance.m} {instance.k}"]
    lines += [str(s) for s in instance.keywords]
    lines += [str(x) for x in instance.words]
    return "\n".join(lines) + "\n"


def parse(text: str) -> Instance:
    lines = [ln.strip() for ln in io.StringIO(text)]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise InstanceFormatError("empty instance file")
    try:
        d, m, k = (int(v) for v in lines[0].split())
    except ValueError:
        raise InstanceFormatError(f"bad header line: {lines[0]!r}") from None
    if min(d, m, k) < 1:
        raise InstanceFormatError("d, m, k must be positive")
    body = lines[1:]
    if len(body) != d + m:
        raise InstanceFormatError(f"expected {d + m} string lines, found {len(body)}")
    strings = []
    for lineno, s in enumerate(body, start=2):
        if len(s) != k:
            raise InstanceFormatError(f"line {lineno}: expected length {k}, got {len(s)}")
        try:
            strings.append(BitString(s))
        except ValueError as exc:
            raise InstanceFormatError(f"line {lineno}: {exc}") from None
    return Instance(tuple(strings[:d]), tuple(strings[d:]))


def load(path) -> Instance:
    with open(path, encoding="ascii") as fh:
        return parse(fh.read())


def save(instance: Instance, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize(instance))

