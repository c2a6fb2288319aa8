"""Random workloads and the centralised-vs-decentralised benchmark harness."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .decentral import Architecture
from .formula import (
    FALSE, TRUE, And, Atom, Finally, Formula, Globally, Next, Not, Or, Until,
    substitute,
)
from .patterns import KINDS, SCOPES, placeholders, template
from .simulation import (
    GlobalTrace, RunResult, architecture_from_dict, run_centralised, run_decentralised,
)

CSV_HEADER = ("label", "c_trace", "c_msg", "d_trace", "d_msg", "ratio_trace", "ratio_msg", "inconclusive")

DEFAULT_PROB = 0.5
# Pattern verdicts hinge on rare scope/trigger events; with p = 0.5 most
# patterns conclude within two or three events.
DEFAULT_PATTERN_PROB = 0.01


# --------------------------------------------------------------- formulae

# Leaves mostly mention two propositions, so even small formulae couple
# components. Nested F/G rarely reach a verdict on random traces, so X
# dominates: it is what makes the verdict horizon grow with size.
_STATE_WEIGHTS = np.array([0.2, 0.05, 0.375, 0.375])      # p, !p, p & q, p | q
_OPS = ("X", "F", "G", "U", "and", "or", "not")
_OP_WEIGHTS = np.array([8.0, 1.0, 1.0, 1.0, 0.3, 0.3, 0.2])
_OP_WEIGHTS = _OP_WEIGHTS / _OP_WEIGHTS.sum()


def _state_formula(alphabet: Sequence[str], rng: np.random.Generator) -> Formula:
    pick = lambda: Atom(alphabet[rng.integers(len(alphabet))])  # noqa: E731
    kind = rng.choice(4, p=_STATE_WEIGHTS)
    if kind == 0:
        return pick()
    if kind == 1:
        return Not(pick())
    if kind == 2:
        return And(pick(), pick())
    return Or(pick(), pick())


def _gen(size: int, alphabet: Sequence[str], rng: np.random.Generator) -> Formula:
    if size == 0:
        return _state_formula(alphabet, rng)
    op = _OPS[rng.choice(len(_OPS), p=_OP_WEIGHTS)]
    if op in ("X", "F", "G"):
        inner = _gen(size - 1, alphabet, rng)
        return {"X": Next, "F": Finally, "G": Globally}[op](inner)
    if op == "U":
        k = int(rng.integers(size))          # temporal ops left of U
        return Until(_gen(k, alphabet, rng), _gen(size - 1 - k, alphabet, rng))
    if op == "not":
        return Not(_gen(size, alphabet, rng))
    k = int(rng.integers(size + 1))
    cls = And if op == "and" else Or
    return cls(_gen(k, alphabet, rng), _gen(size - k, alphabet, rng))


def gen_random_formula(size: int, alphabet: Sequence[str], rng: np.random.Generator,
                       max_tries: int = 100) -> Formula:
    """Random past-free formula with exactly ``size`` temporal operators.

    Candidates that contain a trivially constant top level are redrawn.
    """
    if size < 1:
        raise ValueError("target size must be >= 1")
    alphabet = sorted(alphabet)
    if not alphabet:
        raise ValueError("alphabet must not be empty")
    f = None
    for _ in range(max_tries):
        f = _gen(size, alphabet, rng)
        if f is not TRUE and f is not FALSE:
            return f
    return f


def gen_pattern_formula(kind: str, alphabet: Sequence[str], rng: np.random.Generator,
                        scope: str | None = None) -> Formula:
    """Instantiate a uniformly chosen template of ``kind``.

    Placeholders get distinct propositions when the alphabet is large
    enough, otherwise they are drawn with replacement.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown pattern kind {kind!r}; choose from {', '.join(KINDS)}")
    alphabet = sorted(alphabet)
    if not alphabet:
        raise ValueError("alphabet must not be empty")
    if scope is None:
        scope = SCOPES[rng.integers(len(SCOPES))]
    holes = placeholders(kind, scope)
    if len(holes) <= len(alphabet):
        chosen = rng.choice(len(alphabet), size=len(holes), replace=False)
    else:
        chosen = rng.integers(len(alphabet), size=len(holes))
    return substitute(template(kind, scope), {h: alphabet[c] for h, c in zip(holes, chosen)})


def gen_trace(arch: Architecture, length: int, prob: float, rng: np.random.Generator) -> GlobalTrace:
    """Each proposition holds in each event independently with probability ``prob``."""
    if length < 1:
        raise ValueError("trace length must be >= 1")
    k = len(arch.props)
    draws = rng.random((length, k)) < prob
    codes = draws.astype(np.int64) @ (np.int64(1) << np.arange(k, dtype=np.int64))
    return GlobalTrace(arch, codes)


# ---------------------------------------------------------------- harness


@dataclass
class BenchConfig:
    arch: Architecture = field(default_factory=lambda: Architecture.from_partition([["a"], ["b"], ["c"]]))
    source: str = "random"                       # "random" | "pattern"
    labels: tuple | None = None                  # sizes, or pattern kinds; None: all
    runs: int = 1000
    prob: float | None = None                    # None: per-source default
    cap: int = 10_000
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.source not in ("random", "pattern"):
            raise ValueError("source must be 'random' or 'pattern'")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.cap < 1:
            raise ValueError("cap must be >= 1")
        if self.prob is None:
            self.prob = DEFAULT_PROB if self.source == "random" else DEFAULT_PATTERN_PROB
        if not 0.0 < self.prob < 1.0:
            raise ValueError("prob must lie in (0, 1)")
        if self.labels is None:
            self.labels = (1, 2, 3, 4, 5, 6) if self.source == "random" else KINDS
        self.labels = tuple(self.labels)
        if self.source == "pattern":
            for k in self.labels:
                if k not in KINDS:
                    raise ValueError(f"unknown pattern kind {k!r}")
        else:
            self.labels = tuple(int(s) for s in self.labels)
            if any(s < 1 for s in self.labels):
                raise ValueError("formula sizes must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "BenchConfig":
        data = dict(data)
        if "arch" in data:
            data["arch"] = architecture_from_dict(data["arch"])
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "BenchConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunRecord:
    central: RunResult
    decentral: RunResult | None

    @property
    def conclusive(self) -> bool:
        return (self.central.verdict.conclusive and self.decentral is not None
                and self.decentral.verdict.conclusive)


@dataclass
class BenchRow:
    label: str
    c_trace: float
    c_msg: float
    d_trace: float
    d_msg: float
    ratio_trace: float
    ratio_msg: float
    inconclusive: int
    conclusive: int = 0

    def as_csv(self) -> list[str]:
        return [self.label] + [_fmt(x) for x in (self.c_trace, self.c_msg, self.d_trace,
                                                 self.d_msg, self.ratio_trace, self.ratio_msg)] \
            + [str(self.inconclusive)]


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.4f}"


def run_seed(seed: int, label_index: int, run: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(label_index, run)))


def one_run(arch: Architecture, formula: Formula, trace: GlobalTrace) -> RunRecord:
    """Compare both modes; the decentralised run is skipped when the central one is inconclusive."""
    decentral = None
    central = run_centralised(arch, formula, trace)
    if central.verdict.conclusive:
        decentral = run_decentralised(arch, formula, trace, arch.n)
    return RunRecord(central, decentral)


def _formula_for(cfg: BenchConfig, label, rng: np.random.Generator, alphabet) -> Formula:
    if cfg.source == "random":
        return gen_random_formula(label, alphabet, rng)
    return gen_pattern_formula(label, alphabet, rng)


def _task(args) -> list[RunRecord]:
    cfg, arch, label, seed_index, runs, alphabet = args
    out = []
    for r in runs:
        rng = run_seed(cfg.seed, seed_index, r)
        f = _formula_for(cfg, label, rng, alphabet)
        trace = gen_trace(arch, cfg.cap, cfg.prob, rng)
        out.append(one_run(arch, f, trace))
    return out


def _collect(cfg: BenchConfig, tasks: list[tuple]) -> list[list[RunRecord]]:
    if cfg.jobs <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(_task, tasks))


def summarise(label: str, records: Sequence[RunRecord]) -> BenchRow:
    done = [r for r in records if r.conclusive]
    if not done:
        nan = float("nan")
        return BenchRow(label, nan, nan, nan, nan, nan, nan, len(records), 0)
    c_trace = float(np.mean([r.central.steps for r in done]))
    c_msg = float(np.mean([r.central.messages for r in done]))
    d_trace = float(np.mean([r.decentral.steps for r in done]))
    d_msg = float(np.mean([r.decentral.messages for r in done]))
    return BenchRow(label, c_trace, c_msg, d_trace, d_msg, d_trace / c_trace,
                    d_msg / c_msg if c_msg else float("nan"), len(records) - len(done), len(done))


def run_benchmark_records(cfg: BenchConfig, arch: Architecture | None = None,
                          alphabet: Sequence[str] | None = None,
                          seed_by_label: bool = True) -> dict:
    arch = arch or cfg.arch
    alphabet = tuple(alphabet or arch.props)
    tasks = []
    for li, label in enumerate(cfg.labels):
        chunk = max(1, cfg.runs // max(1, cfg.jobs * 4))
        for start in range(0, cfg.runs, chunk):
            runs = range(start, min(cfg.runs, start + chunk))
            tasks.append((label, (cfg, arch, label, li if seed_by_label else 0, runs, alphabet)))
    results = _collect(cfg, [t for _, t in tasks])
    out: dict = {label: [] for label in cfg.labels}
    for (label, _), recs in zip(tasks, results):
        out[label].extend(recs)
    return out


def run_benchmark(cfg: BenchConfig) -> list[BenchRow]:
    """One row per label, averaged over runs where both modes concluded."""
    records = run_benchmark_records(cfg)
    return [summarise(str(label), records[label]) for label in cfg.labels]


def partition(props: Sequence[str], k: int) -> list[list[str]]:
    """Split ``props`` into ``k`` contiguous, nearly equal blocks."""
    if not 1 <= k <= len(props):
        raise ValueError(f"cannot split {len(props)} propositions into {k} components")
    return [list(b) for b in np.array_split(np.array(list(props), dtype=object), k)]


def bench_architectures(kind: str, alphabet: Sequence[str] = ("a", "b", "c", "d", "e"),
                        counts: Sequence[int] = (2, 3, 4, 5), cfg: BenchConfig | None = None
                        ) -> list[BenchRow]:
    """Same pattern workload over different splits of one alphabet.

    Run ``r`` uses the same formula and trace for every component count.
    """
    alphabet = tuple(sorted(alphabet))
    cfg = cfg or BenchConfig(source="pattern", labels=(kind,))
    cfg = replace(cfg, source="pattern", labels=(kind,))
    rows = []
    for k in counts:
        arch = Architecture.from_partition(partition(alphabet, k))
        recs = run_benchmark_records(cfg, arch, alphabet, seed_by_label=False)[kind]
        rows.append(summarise(str(k), recs))
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()
