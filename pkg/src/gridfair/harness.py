"""Experiment orchestration: layout/model sweeps over parsed runs.

A sweep evaluates every combination of system, layout plan, browsing
model, and metric, producing one aggregate row per combination (and
optionally per-request rows). Requests can be evaluated in a thread pool;
results are buffered and sorted before writing, so the worker count never
changes the output bytes.
"""

from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .browse import (
    ADJUST_NONE,
    ADJUSTMENTS,
    BASES,
    ROW_SKIP,
    SLOW_DECAY,
    BrowsingModelSpec,
    attention,
)
from .core import AlignmentTable, Ranking, RelevanceJudgments
from .errors import ConfigError, ParseError
from .io import ResultsRow, RunFile, parse_alignment, parse_qrels, parse_run, write_results
from .layout import (
    GEOMETRY_KINDS,
    HORIZONTAL,
    VERTICAL,
    WRAPPED_GRID,
    GridLayout,
    LayoutGeometry,
    rewrap,
    truncate,
    wrap,
)
from .metrics import (
    ESTIMATOR_MODES,
    DistanceSpec,
    PopulationEstimator,
    awrf,
    awrf_system,
    drop_unknown,
    eel,
    group_exposure,
    population_estimator,
    target_exposure,
)

REDUCTIONS = ("truncate", "rewrap")
METRICS = ("awrf", "eel")
DEFAULT_COLUMN_SIZES = (10, 8, 6, 5, 4, 3)


@dataclass(frozen=True)
class RenderPlan:
    """One way of putting a ranking on screen.

    ``columns`` is the displayed width (0 stands for "as wide as the
    list", used by horizontal layouts). Reduced plans first wrap at
    ``base_columns`` and then truncate or re-wrap down to ``columns``.
    """

    geometry: str
    columns: int
    reduction: str = "none"
    base_columns: int | None = None

    def render(self, ranking: Ranking) -> GridLayout:
        if self.geometry == VERTICAL:
            return wrap(ranking, 1)
        if self.geometry == HORIZONTAL:
            return wrap(ranking, max(1, len(ranking.items)))
        if self.reduction == "truncate":
            return truncate(wrap(ranking, self.base_columns), self.columns)
        if self.reduction == "rewrap":
            return rewrap(wrap(ranking, self.base_columns), self.columns)
        return wrap(ranking, self.columns)


@dataclass
class SweepConfig:
    """Inputs and every axis of a measurement sweep."""

    runs: list[str] = field(default_factory=list)
    alignment: str | None = None
    qrels: str | None = None
    geometries: list[LayoutGeometry] = field(default_factory=list)
    columns: list[int] = field(default_factory=lambda: list(DEFAULT_COLUMN_SIZES))
    reductions: list[str] = field(default_factory=list)
    base_columns: int = 10
    bases: list[str] = field(default_factory=lambda: ["geometric"])
    adjustments: list[str] = field(default_factory=lambda: [ADJUST_NONE])
    alphas: list[float] = field(default_factory=lambda: [0.5])
    gammas: list[float] = field(default_factory=lambda: [0.5])
    betas: list[float] = field(default_factory=lambda: [1.9])
    satisfaction: float = 0.5
    within_row: str = "prefix"
    metrics: list[str] = field(default_factory=lambda: ["awrf"])
    target: str = "catalog"
    delta: str = "l1"
    protected: str | None = None
    exclude_unknown: bool = False
    per_request: bool = False
    jobs: int = 1
    seed: int = 0
    output: str | None = None

    def validate(self) -> None:
        if not self.runs:
            raise ConfigError("at least one run file is required")
        if self.alignment is None:
            raise ConfigError("an alignment file is required")
        if not self.metrics:
            raise ConfigError("at least one metric is required")
        for metric in self.metrics:
            if metric not in METRICS:
                raise ConfigError(f"unknown metric {metric!r}")
        for red in self.reductions:
            if red not in REDUCTIONS:
                raise ConfigError(f"unknown reduction {red!r}")
        for base in self.bases:
            if base not in BASES:
                raise ConfigError(f"unknown base model {base!r}")
        for adj in self.adjustments:
            if adj not in ADJUSTMENTS:
                raise ConfigError(f"unknown adjustment {adj!r}")
        if self.reductions:
            if self.base_columns < 1:
                raise ConfigError("base grid width must be positive")
            over = [c for c in self.columns if c > self.base_columns]
            if over:
                raise ConfigError(
                    f"column sizes {over} exceed the base grid width {self.base_columns}"
                )
            if not self.columns:
                raise ConfigError("reductions requested but no column sizes given")
        if not self.geometries and not self.reductions:
            raise ConfigError("no layouts to measure: give geometries or reductions")
        mode = self.target.split(":", 1)[0]
        if mode not in ESTIMATOR_MODES:
            raise ConfigError(f"unknown target estimator {self.target!r}")
        if self.delta not in ("l1", "l2", "signed"):
            raise ConfigError(f"unknown distance {self.delta!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.output is None:
            raise ConfigError("an output path is required")

    def plans(self) -> list[RenderPlan]:
        plans = []
        for geom in self.geometries:
            columns = 0 if geom.kind == HORIZONTAL else geom.columns
            plans.append(RenderPlan(geometry=geom.kind, columns=columns))
        for red in self.reductions:
            for size in self.columns:
                plans.append(
                    RenderPlan(
                        geometry=WRAPPED_GRID,
                        columns=size,
                        reduction=red,
                        base_columns=self.base_columns,
                    )
                )
        return plans

    def browsing_specs(self) -> list[BrowsingModelSpec]:
        """Cross-product of bases, adjustments, and the parameter grids.

        Parameters inert for an adjustment (gamma without row skipping,
        beta without slow decay) stay at their defaults so the sweep does
        not emit duplicate configurations.
        """
        defaults = BrowsingModelSpec()
        specs = []
        seen = set()
        for base in self.bases:
            for adj in self.adjustments:
                gammas = self.gammas if adj == ROW_SKIP else [defaults.gamma]
                betas = self.betas if adj == SLOW_DECAY else [defaults.beta]
                for alpha in self.alphas:
                    for gamma in gammas:
                        for beta in betas:
                            key = (base, adj, alpha, gamma, beta)
                            if key in seen:
                                continue
                            seen.add(key)
                            specs.append(
                                BrowsingModelSpec(
                                    base=base,
                                    adjustment=adj,
                                    alpha=alpha,
                                    gamma=gamma,
                                    beta=beta,
                                    satisfaction=self.satisfaction,
                                    within_row=self.within_row,
                                )
                            )
        return specs

    def distance(self) -> DistanceSpec:
        kind = "signed-two-group" if self.delta == "signed" else self.delta
        return DistanceSpec(kind=kind, protected=self.protected)


def parse_geometry(token: str) -> LayoutGeometry:
    """Parse ``vertical-linear``, ``horizontal-linear``, or
    ``wrapped-grid:<columns>``."""
    if token == VERTICAL:
        return LayoutGeometry(VERTICAL, 1)
    if token == HORIZONTAL:
        return LayoutGeometry(HORIZONTAL, 1)
    if token.startswith(WRAPPED_GRID):
        rest = token[len(WRAPPED_GRID) :]
        if rest.startswith(":"):
            try:
                return LayoutGeometry(WRAPPED_GRID, int(rest[1:]))
            except ValueError:
                raise ConfigError(f"bad grid width in geometry {token!r}")
    raise ConfigError(
        f"unknown geometry {token!r}; expected one of {GEOMETRY_KINDS} "
        f"(wrapped-grid takes a width, e.g. wrapped-grid:5)"
    )


def _parse_fixed_target(path, table: AlignmentTable) -> np.ndarray:
    values = np.zeros(table.schema.size)
    seen = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(path, lineno, f"expected 'group weight', got {line!r}")
            name, weight_s = parts
            if name not in table.schema.names:
                raise ParseError(path, lineno, f"group {name!r} not in the alignment schema")
            if name in seen:
                raise ParseError(path, lineno, f"duplicate group {name!r}")
            try:
                values[table.schema.index(name)] = float(weight_s)
            except ValueError:
                raise ParseError(path, lineno, f"weight {weight_s!r} is not a number")
            seen.add(name)
    return values


def resolve_shared_target(target: str, table: AlignmentTable) -> np.ndarray | None:
    """Target distribution shared by all requests, or None when the
    estimator depends on each request's retrieved set."""
    mode = target.split(":", 1)[0]
    if mode == "retrieved":
        return None
    if mode == "fixed":
        if ":" not in target:
            raise ConfigError("fixed target needs a path: fixed:<path>")
        fixed = _parse_fixed_target(target.split(":", 1)[1], table)
        return population_estimator(PopulationEstimator("fixed", fixed), table)
    if mode not in ("uniform", "catalog"):
        raise ConfigError(f"unknown target estimator {target!r}")
    return population_estimator(PopulationEstimator(mode), table)


def _evaluate_request(
    run: RunFile,
    request: str,
    plans: Sequence[RenderPlan],
    specs: Sequence[BrowsingModelSpec],
    metrics: Sequence[str],
    table: AlignmentTable,
    rel: RelevanceJudgments | None,
    shared_target: np.ndarray | None,
    delta: DistanceSpec,
    exclude_unknown: bool,
) -> dict[tuple[int, int, str], float]:
    rankings = run.rankings[request]
    union_docs = sorted({doc for ranking in rankings for doc in ranking.items})
    if shared_target is None:
        tgt = population_estimator(PopulationEstimator("retrieved"), table, union_docs)
    else:
        tgt = shared_target
    out: dict[tuple[int, int, str], float] = {}
    for pi, plan in enumerate(plans):
        grids = [plan.render(r) for r in rankings]
        matrices = [table.matrix(g.items) for g in grids]
        for si, spec in enumerate(specs):
            exposures = [
                group_exposure(attention(grid, rel, spec), mat)
                for grid, mat in zip(grids, matrices)
            ]
            if "awrf" in metrics:
                scores = [
                    awrf(expo, tgt, delta, table.schema, exclude_unknown)
                    for expo in exposures
                ]
                out[(pi, si, "awrf")] = awrf_system(scores)
            if "eel" in metrics:
                system = exposures[0].copy()
                for expo in exposures[1:]:
                    system += expo
                system /= len(exposures)
                ideal = target_exposure(request, union_docs, rel, plan.render, spec, table)
                if exclude_unknown:
                    system = drop_unknown(system, table.schema)
                    ideal = drop_unknown(ideal, table.schema)
                out[(pi, si, "eel")] = eel(system, ideal)
    return out


def measure(config: SweepConfig) -> list[ResultsRow]:
    """Run the configured sweep and write the results CSV.

    All input files are parsed before any computation, so missing or
    malformed inputs fail fast. Expected-exposure rows need judgments;
    when none are configured they are skipped with a warning.
    """
    config.validate()
    runs = [parse_run(path) for path in config.runs]
    table = parse_alignment(config.alignment)
    rel = parse_qrels(config.qrels) if config.qrels else None

    metrics = list(config.metrics)
    if "eel" in metrics and rel is None:
        print(
            "warning: expected-exposure rows skipped (no judgments configured)",
            file=sys.stderr,
        )
        metrics = [m for m in metrics if m != "eel"]
        if not metrics:
            raise ConfigError("nothing to measure: eel needs judgments")

    plans = config.plans()
    specs = config.browsing_specs()
    delta = config.distance()
    shared_target = resolve_shared_target(config.target, table)

    tasks = [(ri, request) for ri, run in enumerate(runs) for request in run.requests()]

    def work(task):
        ri, request = task
        return task, _evaluate_request(
            runs[ri],
            request,
            plans,
            specs,
            metrics,
            table,
            rel,
            shared_target,
            delta,
            config.exclude_unknown,
        )

    results: dict[tuple[int, str], dict] = {}
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            for task, values in pool.map(work, tasks):
                results[task] = values
    else:
        for task in tasks:
            results[task] = work(task)[1]

    rows: list[ResultsRow] = []
    for ri, run in enumerate(runs):
        requests = run.requests()
        for pi, plan in enumerate(plans):
            for si, spec in enumerate(specs):
                for metric in metrics:
                    per_request = [
                        results[(ri, request)][(pi, si, metric)] for request in requests
                    ]
                    fields = dict(
                        system=run.system,
                        geometry=plan.geometry,
                        columns=plan.columns,
                        reduction=plan.reduction,
                        base=spec.base,
                        adjustment=spec.adjustment,
                        alpha=spec.alpha,
                        gamma=spec.gamma,
                        beta=spec.beta,
                        metric=metric,
                    )
                    rows.append(
                        ResultsRow(request="ALL", value=awrf_system(per_request), **fields)
                    )
                    if config.per_request:
                        for request, value in zip(requests, per_request):
                            rows.append(
                                ResultsRow(request=request, value=value, **fields)
                            )
    write_results(rows, config.output)
    return rows


def attention_dump(
    plan: RenderPlan, spec: BrowsingModelSpec, length: int
) -> list[tuple[int, int, int, float]]:
    """Weights of a synthetic ranking of the given length under one plan:
    (reading rank, row, column, weight) per displayed item."""
    if length < 0:
        raise ConfigError("length must be non-negative")
    if length == 0:
        return []
    ranking = Ranking(
        request="synthetic",
        sample=0,
        items=tuple(f"d{i}" for i in range(length)),
    )
    grid = plan.render(ranking)
    weights = attention(grid, None, spec)
    out = []
    for doc in grid.items:
        row, col, rank = grid.position(doc)
        out.append((rank, row, col, float(weights[rank])))
    return out


# ---------------------------------------------------------------------------
# ordering-consistency comparison of measured configurations
# ---------------------------------------------------------------------------

COMPARE_KEYS = (
    "geometry",
    "columns",
    "reduction",
    "base",
    "adjustment",
    "alpha",
    "gamma",
    "beta",
)


def compare_orderings(
    rows: Sequence[ResultsRow], keys: Sequence[str] = COMPARE_KEYS
) -> list[dict]:
    """Kendall tau-b between the system orderings of configuration pairs.

    Configurations are the distinct values of ``keys`` (plus the metric)
    among aggregate rows. Pairs sharing fewer than two systems are
    reported as not comparable rather than failing.
    """
    from scipy.stats import kendalltau

    for key in keys:
        if key not in COMPARE_KEYS:
            raise ConfigError(f"unknown grouping key {key!r}")
    configs: dict[tuple, dict[str, float]] = {}
    for row in rows:
        if row.request != "ALL":
            continue
        key = (row.metric,) + tuple(getattr(row, k) for k in keys)
        configs.setdefault(key, {})[row.system] = row.value
    reports = []
    ordered = sorted(configs)
    for i, key_a in enumerate(ordered):
        for key_b in ordered[i + 1 :]:
            if key_a[0] != key_b[0]:
                continue
            systems = sorted(set(configs[key_a]) & set(configs[key_b]))
            label_a = _config_label(keys, key_a[1:])
            label_b = _config_label(keys, key_b[1:])
            report = {
                "metric": key_a[0],
                "config_a": label_a,
                "config_b": label_b,
                "n_systems": len(systems),
            }
            if len(systems) < 2:
                report["comparable"] = False
            else:
                a = np.array([configs[key_a][s] for s in systems])
                b = np.array([configs[key_b][s] for s in systems])
                tau = kendalltau(a, b).statistic
                deltas = b - a
                report.update(
                    comparable=True,
                    tau=float(tau),
                    mean_delta=float(deltas.mean()),
                    max_abs_delta=float(np.abs(deltas).max()),
                    deltas={s: float(d) for s, d in zip(systems, deltas)},
                )
            reports.append(report)
    return reports


def _config_label(keys: Sequence[str], values: tuple) -> str:
    return ",".join(f"{k}={v}" for k, v in zip(keys, values))
