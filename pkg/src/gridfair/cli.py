"""Command-line harness.

Subcommands:

* ``attention``: print the weight table of a browsing model on a
  synthetic ranking (optionally cross-checked by simulation).
* ``measure``: sweep layouts x browsing models x metrics over run files
  and write a results CSV.
* ``rerank``: greedily re-rank a run toward a target group distribution.
* ``compare``: ordering-consistency report between measured
  configurations.

Exit codes: 0 success, 1 usage/config errors, 2 I/O and parse errors.
"""

from __future__ import annotations

import argparse
import csv
import sys

import yaml

from .browse import ROW_SKIP, BrowsingModelSpec
from .core import Ranking
from .errors import ConfigError, GridfairError, ParseError
from .harness import (
    COMPARE_KEYS,
    RenderPlan,
    SweepConfig,
    attention_dump,
    compare_orderings,
    measure,
    parse_geometry,
    resolve_shared_target,
)
from .io import parse_alignment, parse_run, read_results, write_run
from .layout import VERTICAL, WRAPPED_GRID
from .mc import simulate_row_skip
from .metrics import PopulationEstimator, population_estimator
from .rerank import RerankSpec, greedy_rerank

_CONFIG_KEYS = {
    "runs",
    "alignment",
    "qrels",
    "geometries",
    "columns",
    "reductions",
    "base_columns",
    "models",
    "adjustments",
    "alphas",
    "gammas",
    "betas",
    "satisfaction",
    "within_row",
    "metrics",
    "target",
    "delta",
    "protected",
    "exclude_unknown",
    "per_request",
    "jobs",
    "seed",
    "output",
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the exit-code contract."""

    def error(self, message):
        raise ConfigError(message)


def _split(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _floats(text: str) -> list[float]:
    try:
        return [float(part) for part in _split(text)]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(part) for part in _split(text)]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}")


def _load_config_file(path) -> dict:
    with open(path, encoding="utf-8") as handle:
        try:
            data = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _as_list(value) -> list:
    if isinstance(value, (str, int, float)):
        return [value]
    return list(value)


def _build_sweep_config(args) -> SweepConfig:
    data = _load_config_file(args.config) if args.config else {}

    def pick(flag, key, fallback):
        if flag is not None:
            return flag
        if key in data and data[key] is not None:
            return data[key]
        return fallback

    geometries = _as_list(
        pick(_split(args.geometry) if args.geometry else None, "geometries", [])
    )
    config = SweepConfig(
        runs=[str(p) for p in _as_list(pick(args.run or None, "runs", []))],
        alignment=pick(args.alignment, "alignment", None),
        qrels=pick(args.qrels, "qrels", None),
        geometries=[parse_geometry(str(tok)) for tok in geometries],
        columns=[int(c) for c in _as_list(pick(args.columns, "columns", [10, 8, 6, 5, 4, 3]))],
        reductions=[str(r) for r in _as_list(pick(args.reduction, "reductions", []))],
        base_columns=int(pick(args.base_columns, "base_columns", 10)),
        bases=[str(b) for b in _as_list(pick(args.model, "models", ["geometric"]))],
        adjustments=[str(a) for a in _as_list(pick(args.adjust, "adjustments", ["none"]))],
        alphas=[float(a) for a in _as_list(pick(args.alpha, "alphas", [0.5]))],
        gammas=[float(g) for g in _as_list(pick(args.gamma, "gammas", [0.5]))],
        betas=[float(b) for b in _as_list(pick(args.beta, "betas", [1.9]))],
        satisfaction=float(pick(args.satisfaction, "satisfaction", 0.5)),
        within_row=pick(args.within_row, "within_row", "prefix"),
        metrics=[str(m) for m in _as_list(pick(args.metrics, "metrics", ["awrf"]))],
        target=pick(args.target, "target", "catalog"),
        delta=pick(args.delta, "delta", "l1"),
        protected=pick(args.protected, "protected", None),
        exclude_unknown=bool(pick(args.exclude_unknown, "exclude_unknown", False)),
        per_request=bool(pick(args.per_request, "per_request", False)),
        jobs=int(pick(args.jobs, "jobs", 1)),
        seed=int(pick(args.seed, "seed", 0)),
        output=pick(args.output, "output", None),
    )
    return config


def _browsing_spec_from_args(args) -> BrowsingModelSpec:
    return BrowsingModelSpec(
        base=args.model or "geometric",
        adjustment=args.adjust or "none",
        alpha=args.alpha if args.alpha is not None else 0.5,
        gamma=args.gamma if args.gamma is not None else 0.5,
        beta=args.beta if args.beta is not None else 1.9,
        satisfaction=args.satisfaction if args.satisfaction is not None else 0.5,
        within_row=args.within_row or "prefix",
    )


def _cmd_attention(args) -> int:
    spec = _browsing_spec_from_args(args)
    if args.geometry:
        geom = parse_geometry(args.geometry)
        columns = 0 if geom.kind == "horizontal-linear" else geom.columns
        plan = RenderPlan(geometry=geom.kind, columns=columns)
    elif args.columns is not None:
        plan = RenderPlan(geometry=WRAPPED_GRID, columns=args.columns)
    else:
        plan = RenderPlan(geometry=VERTICAL, columns=1)
    rows = attention_dump(plan, spec, args.length)
    simulated = None
    if args.simulate:
        if spec.adjustment != ROW_SKIP or spec.within_row != "prefix":
            raise ConfigError("--simulate covers the prefix-mode row-skip model only")
        ranking = Ranking(
            request="synthetic",
            sample=0,
            items=tuple(f"d{i}" for i in range(args.length)),
        )
        grid = plan.render(ranking)
        simulated = simulate_row_skip(grid, None, spec, args.simulate, args.seed or 0)
    header = "rank row col weight"
    if simulated is not None:
        header += " simulated stderr"
    print(header)
    for rank, row, col, weight in rows:
        line = f"{rank} {row} {col} {weight:.10g}"
        if simulated is not None:
            line += f" {simulated[0][rank]:.10g} {simulated[1][rank]:.3g}"
        print(line)
    return 0


def _cmd_measure(args) -> int:
    config = _build_sweep_config(args)
    rows = measure(config)
    print(f"wrote {len(rows)} rows to {config.output}")
    return 0


def _cmd_rerank(args) -> int:
    run = parse_run(args.run)
    table = parse_alignment(args.alignment)
    browsing = _browsing_spec_from_args(args)
    shared = resolve_shared_target(args.target or "catalog", table)
    reranked = []
    for request in run.requests():
        for ranking in run.rankings[request]:
            if shared is None:
                target = population_estimator(
                    PopulationEstimator("retrieved"), table, sorted(ranking.items)
                )
            else:
                target = shared
            spec = RerankSpec(target=target, browsing=browsing, pool=args.pool)
            reranked.append(greedy_rerank(ranking, table, spec))
    write_run(reranked, run.system, args.output)
    print(f"wrote {len(reranked)} re-ranked lists to {args.output}")
    return 0


def _cmd_compare(args) -> int:
    rows = read_results(args.results)
    keys = _split(args.by) if args.by else list(COMPARE_KEYS)
    reports = compare_orderings(rows, keys)
    if not reports:
        print("nothing to compare (need aggregate rows for >= 2 configurations)")
        return 0
    for rep in reports:
        head = f"[{rep['metric']}] {rep['config_a']}  vs  {rep['config_b']}"
        if not rep["comparable"]:
            print(f"{head}\n  not comparable ({rep['n_systems']} shared system(s))")
            continue
        print(
            f"{head}\n"
            f"  tau_b={rep['tau']:.6g} systems={rep['n_systems']} "
            f"mean_delta={rep['mean_delta']:.6g} max|delta|={rep['max_abs_delta']:.6g}"
        )
        if args.per_system:
            for system, delta in sorted(rep["deltas"].items()):
                print(f"    {system}: {delta:+.6g}")
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(
                ["metric", "config_a", "config_b", "n_systems", "tau_b", "mean_delta", "max_abs_delta"]
            )
            for rep in reports:
                writer.writerow(
                    [
                        rep["metric"],
                        rep["config_a"],
                        rep["config_b"],
                        rep["n_systems"],
                        f"{rep['tau']:.12g}" if rep["comparable"] else "",
                        f"{rep['mean_delta']:.12g}" if rep["comparable"] else "",
                        f"{rep['max_abs_delta']:.12g}" if rep["comparable"] else "",
                    ]
                )
        print(f"wrote comparison CSV to {args.output}")
    return 0


def _add_model_flags(parser, lists: bool):
    """Browsing-model flags; comma-separated lists on ``measure``."""
    if lists:
        parser.add_argument("--model", type=_split, help="base models (geometric,cascade)")
        parser.add_argument("--adjust", type=_split, help="adjustments (none,row-skip,slow-decay)")
        parser.add_argument("--alpha", type=_floats, help="continuation probabilities")
        parser.add_argument("--gamma", type=_floats, help="row-skipping probabilities")
        parser.add_argument("--beta", type=_floats, help="slow-decay boosts")
    else:
        parser.add_argument("--model", choices=("geometric", "cascade"))
        parser.add_argument("--adjust", choices=("none", "row-skip", "slow-decay"))
        parser.add_argument("--alpha", type=float)
        parser.add_argument("--gamma", type=float)
        parser.add_argument("--beta", type=float)
    parser.add_argument("--satisfaction", type=float, help="cascade stop strength in [0,1]")
    parser.add_argument("--within-row", dest="within_row", choices=("prefix", "full"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridfair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_att = sub.add_parser("attention", help="print a browsing model's weight table")
    p_att.add_argument("--length", type=int, required=True)
    p_att.add_argument("--geometry", help="vertical-linear | horizontal-linear | wrapped-grid:<c>")
    p_att.add_argument("--columns", type=int)
    _add_model_flags(p_att, lists=False)
    p_att.add_argument("--simulate", type=int, default=0, help="cross-check weights with this many sampled sessions")
    p_att.add_argument("--seed", type=int, default=0)
    p_att.set_defaults(func=_cmd_attention)

    p_meas = sub.add_parser("measure", help="sweep layouts and models over run files")
    p_meas.add_argument("--config", help="YAML config; flags override its keys")
    p_meas.add_argument("--run", action="append", help="run file (repeatable)")
    p_meas.add_argument("--qrels")
    p_meas.add_argument("--alignment")
    p_meas.add_argument("--geometry", help="comma-separated geometry tokens")
    p_meas.add_argument("--columns", type=_ints, help="column sizes for reductions")
    p_meas.add_argument("--base-columns", dest="base_columns", type=int)
    p_meas.add_argument("--reduction", type=_split, help="truncate,rewrap")
    _add_model_flags(p_meas, lists=True)
    p_meas.add_argument("--metrics", type=_split, help="awrf,eel")
    p_meas.add_argument("--target", help="uniform | catalog | retrieved | fixed:<path>")
    p_meas.add_argument("--delta", choices=("l1", "l2", "signed"))
    p_meas.add_argument("--protected", help="protected group for the signed distance")
    p_meas.add_argument("--exclude-unknown", dest="exclude_unknown", action="store_const", const=True)
    p_meas.add_argument("--per-request", dest="per_request", action="store_const", const=True)
    p_meas.add_argument("--seed", type=int)
    p_meas.add_argument("--jobs", type=int)
    p_meas.add_argument("--output")
    p_meas.set_defaults(func=_cmd_measure)

    p_rr = sub.add_parser("rerank", help="greedy fairness-aware re-ranking of a run")
    p_rr.add_argument("--run", required=True)
    p_rr.add_argument("--alignment", required=True)
    p_rr.add_argument("--output", required=True)
    p_rr.add_argument("--target", default="catalog")
    p_rr.add_argument("--pool", type=int)
    _add_model_flags(p_rr, lists=False)
    p_rr.set_defaults(func=_cmd_rerank)

    p_cmp = sub.add_parser("compare", help="ordering consistency between configurations")
    p_cmp.add_argument("--results", required=True)
    p_cmp.add_argument("--by", help=f"grouping keys (default {','.join(COMPARE_KEYS)})")
    p_cmp.add_argument("--per-system", dest="per_system", action="store_true")
    p_cmp.add_argument("--output", help="also write the report as CSV")
    p_cmp.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GridfairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
