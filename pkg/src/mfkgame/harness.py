"""Seeded trial execution, summaries, sweeps and CSV/JSON reporting."""

from __future__ import annotations

import csv
import functools
import io
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional, Sequence

from .engine import GameConfig, ProtocolError, run_game
from .mfk import HardInstanceSpec, Instance, gen_hard, gen_random, offline_optimum
from .players import ClassicalPlayer, ConstantPlayer, OraclePlayer, PlayerConfig, QuantumPlayer
from .qsim import BackendConfig

PLAYERS = ("quantum", "classical", "oracle", "constant")
SUMMARY = "summary"


@dataclass(frozen=True)
class TrialSpec:
    instance: Instance
    player: str
    backend: BackendConfig
    buffer_size: int
    answer_period: int
    trial: int
    trial_seed: int
    generator: str = "file"
    instance_seed: int = -1
    tracker_mode: str = "faithful"
    constant_answer: int = 1


@dataclass
class RunReport:
    """One CSV row; column order is the field order."""

    trial: int
    trial_seed: int
    generator: str
    instance_seed: int
    d: int
    m: int
    k: int
    player: str
    backend: str
    error: float
    K: int
    R: int
    cost: int
    opt_cost: int
    ratio: float
    wrong_significant: int
    total_rounds: int
    active_rounds: int
    loads: int
    buffer_queries: int
    passes: int
    final_answer: int
    optimum: int
    status: str
    message: str

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def failed_answer(self) -> bool:
        """The last significant answer is wrong (the run did not converge)."""
        return self.final_answer != self.optimum


COLUMNS = [f.name for f in fields(RunReport)]
_TYPES = {f.name: f.type for f in fields(RunReport)}


@dataclass
class Summary:
    trials: int
    failed: int
    mean_cost: float
    mean_ratio: float
    mean_wrong: float
    mean_rounds: float
    failure_rate: float
    wrong_distribution: dict


def make_player(spec: TrialSpec):
    inst = spec.instance
    if spec.player == "quantum":
        return QuantumPlayer(inst.d, inst.m, inst.k, PlayerConfig(spec.backend, spec.tracker_mode))
    if spec.player == "classical":
        return ClassicalPlayer(inst.d, inst.m, inst.k, spec.tracker_mode)
    if spec.player == "oracle":
        return OraclePlayer(offline_optimum(inst))
    if spec.player == "constant":
        return ConstantPlayer(spec.constant_answer)
    raise ValueError(f"unknown player {spec.player!r}")


def run_trial(spec: TrialSpec) -> RunReport:
    inst = spec.instance
    base = dict(
        trial=spec.trial,
        trial_seed=spec.trial_seed,
        generator=spec.generator,
        instance_seed=spec.instance_seed,
        d=inst.d,
        m=inst.m,
        k=inst.k,
        player=spec.player,
        backend=spec.backend.kind if spec.player == "quantum" else "none",
        error=spec.backend.error if spec.player == "quantum" else 0.0,
        K=spec.buffer_size,
        R=spec.answer_period,
    )
    config = GameConfig(spec.buffer_size, spec.answer_period, allow_period_above_buffer=True)
    try:
        transcript, report = run_game(make_player(spec), inst, config, spec.trial_seed)
    except ProtocolError as exc:
        return RunReport(
            **base, cost=0, opt_cost=1, ratio=0.0, wrong_significant=0, total_rounds=0,
            active_rounds=0, loads=0, buffer_queries=0, passes=0, final_answer=0,
            optimum=offline_optimum(inst), status="protocol_error", message=str(exc),
        )
    ledger = report.ledger
    return RunReport(
        **base,
        cost=report.cost,
        opt_cost=report.opt_cost,
        ratio=round(float(report.competitive_ratio), 6),
        wrong_significant=report.wrong_significant,
        total_rounds=report.total_rounds,
        active_rounds=ledger.loads + ledger.buffer_queries,
        loads=ledger.loads,
        buffer_queries=ledger.buffer_queries,
        passes=ledger.passes,
        final_answer=report.final_answer,
        optimum=report.optimum,
        status="ok",
        message="",
    )


def run_trials(specs: Sequence[TrialSpec], jobs: int = 1) -> list[RunReport]:
    """Run independent trials, optionally in worker processes; output ordered by trial index."""
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_trial, specs))
    else:
        rows = [run_trial(s) for s in specs]
    return sorted(rows, key=lambda r: r.trial)


def summarize(rows: Sequence[RunReport]) -> Summary:
    good = [r for r in rows if r.ok]
    n = len(good)

    def mean(values):
        return round(sum(values) / n, 6) if n else 0.0

    return Summary(
        trials=len(rows),
        failed=len(rows) - n,
        mean_cost=mean([r.cost for r in good]),
        mean_ratio=mean([r.ratio for r in good]),
        mean_wrong=mean([r.wrong_significant for r in good]),
        mean_rounds=mean([r.active_rounds for r in good]),
        failure_rate=mean([1 if r.failed_answer else 0 for r in good]),
        wrong_distribution=dict(sorted(Counter(r.wrong_significant for r in good).items())),
    )


# --- CSV ---------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _distribution_text(dist: dict) -> str:
    return ";".join(f"{w}:{c}" for w, c in sorted(dist.items()))


def _parse_distribution(text: str) -> dict:
    if not text:
        return {}
    return {int(w): int(c) for w, c in (part.split(":") for part in text.split(";"))}


def summary_row(summary: Summary) -> dict:
    """Summary laid out on the trial columns (means in place of per-trial values)."""
    row = {c: "" for c in COLUMNS}
    row.update(
        trial=SUMMARY,
        trial_seed=summary.trials,
        cost=_fmt(summary.mean_cost),
        ratio=_fmt(summary.mean_ratio),
        wrong_significant=_fmt(summary.mean_wrong),
        active_rounds=_fmt(summary.mean_rounds),
        final_answer=_fmt(summary.failure_rate),
        status="ok" if not summary.failed else f"{summary.failed} failed",
        message=_distribution_text(summary.wrong_distribution),
    )
    return row


def write_csv(rows: Sequence[RunReport], out, with_summary: bool = True) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow(_fmt(getattr(r, c)) for c in COLUMNS)
    if with_summary:
        s = summary_row(summarize(rows))
        writer.writerow(s[c] for c in COLUMNS)


def rows_to_csv(rows: Sequence[RunReport], with_summary: bool = True) -> str:
    out = io.StringIO()
    write_csv(rows, out, with_summary)
    return out.getvalue()


def parse_csv(text: str) -> tuple[list[RunReport], Optional[Summary]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != COLUMNS:
        raise ValueError("unexpected CSV header")
    rows, summary = [], None
    for raw in reader:
        if raw["trial"] == SUMMARY:
            status = raw["status"]
            summary = Summary(
                trials=int(raw["trial_seed"]),
                failed=0 if status == "ok" else int(status.split()[0]),
                mean_cost=float(raw["cost"]),
                mean_ratio=float(raw["ratio"]),
                mean_wrong=float(raw["wrong_significant"]),
                mean_rounds=float(raw["active_rounds"]),
                failure_rate=float(raw["final_answer"]),
                wrong_distribution=_parse_distribution(raw["message"]),
            )
            continue
        values = {}
        for name in COLUMNS:
            kind = _TYPES[name]
            values[name] = {"int": int, "float": float}.get(kind, str)(raw[name])
        rows.append(RunReport(**values))
    return rows, summary


def to_json(rows: Sequence[RunReport]) -> str:
    return json.dumps(
        {"rows": [asdict(r) for r in rows], "summary": asdict(summarize(rows))}, indent=2
    )


# --- sweeps ------------------------------------------------------------------


@functools.lru_cache(maxsize=4)
def _hard_instance(m: int, k: int) -> Instance:
    return gen_hard(HardInstanceSpec.adversarial(m, k))


SWEEP_COLUMNS = [
    "axis", "value", "player", "trials", "mean_cost", "mean_ratio",
    "mean_wrong", "mean_rounds", "failure_rate",
]


def family_instance(family: str, d: int, m: int, k: int, seed: int) -> Instance:
    if family == "hard":
        if d != 2:
            raise ValueError("the hard family has exactly d = 2 keywords")
        return _hard_instance(m, k)
    if family == "random":
        return gen_random(d, m, k, seed)
    raise ValueError(f"unknown instance family {family!r}")


def sweep(
    axis: str,
    values: Sequence[int],
    d: int,
    m: int,
    k: int,
    trials: int,
    seed: int,
    backend: BackendConfig,
    family: str = "hard",
    players: Sequence[str] = ("quantum", "classical"),
    jobs: int = 1,
) -> list[dict]:
    """Mean cost/ratio/wrong/rounds per (axis value, player)."""
    if axis not in ("k", "m"):
        raise ValueError("axis must be 'k' or 'm'")
    if len(values) < 2:
        raise ValueError("a sweep needs at least two axis values")
    results = []
    for value in values:
        dims = {"d": d, "m": m, "k": k, axis: value}
        for player in players:
            specs = []
            for t in range(trials):
                inst_seed = seed + t
                inst = family_instance(family, dims["d"], dims["m"], dims["k"], inst_seed)
                specs.append(
                    TrialSpec(
                        instance=inst, player=player, backend=backend,
                        buffer_size=inst.k, answer_period=inst.k, trial=t,
                        trial_seed=seed + t, generator=family, instance_seed=inst_seed,
                    )
                )
            s = summarize(run_trials(specs, jobs))
            results.append(
                dict(
                    axis=axis, value=value, player=player, trials=s.trials,
                    mean_cost=s.mean_cost, mean_ratio=s.mean_ratio, mean_wrong=s.mean_wrong,
                    mean_rounds=s.mean_rounds, failure_rate=s.failure_rate,
                )
            )
    return results


def sweep_to_csv(results: Sequence[dict]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in results:
        writer.writerow(_fmt(row[c]) for c in SWEEP_COLUMNS)
    return out.getvalue()
