"""Command-line entry point.

Subcommands
-----------
simulate
    Run the generator x weight-distribution simulation study and write
    ``simulation_report.json`` plus a summary-grid ``simulation_table.csv``;
    with ``--svg``, scatter plots for the replicate nearest each
    combination's mean correlation.
analyze
    Per-candidate attitude-network analyses of a survey CSV, the
    connectivity and centrality hypothesis tests, and (optionally) the
    voter/non-voter connectivity comparison.
forecast
    Leave-one-election-out impact forecast for ``--target`` (an election id
    or ``all``), with deviation comparisons against the two mean baselines.
synth
    Write a deterministic synthetic multi-election survey CSV from known
    Ising models.

Every JSON report embeds a run manifest: subcommand, fully resolved
configuration, seed, tool version, SHA-256 digests of input files and
start/finish timestamps. Reports are byte-stable across runs with the same
seed and inputs once the manifest's ``timestamps`` entry is dropped.

All randomness flows from ``--seed`` (default 0); there is no wall-clock
seeding. Exit codes: 0 success, 1 degenerate data, 2 I/O or schema
problems, 3 usage errors. Set ``ATTNET_LOG=debug|info|warning`` for
progress logging.

The JSON block for a graph-generator configuration (embedded in simulate
reports and accepted inside synth ``--spec`` files) carries the fields:
``algorithm`` (``preferential_attachment`` | ``small_world`` |
``erdos_renyi``), ``node_count``, ``m_range``, ``alpha_range``,
``neighbour_range``, ``rewire_p_range``, ``edge_count_range`` and
``weights`` (``{"kind": "normal" | "pareto" | "uniform", ...parameters}``).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import (
    AttnetError,
    CapacityError,
    ConfigurationError,
    ContractError,
    DegenerateDataError,
    ParameterError,
    SchemaError,
)
from .simulation import DISTRIBUTIONS, GENERATORS, StudyConfig, nearest_to_mean, run_study
from .stats import ols_simple
from .survey import (
    AnalysisFilter,
    SynthSpec,
    analyze_all,
    compare_groups,
    forecast_all,
    forecast_impact,
    gen_synthetic_elections,
    hypothesis_tests,
    load_dataset,
    load_element_map,
    write_dataset_csv,
)

log = logging.getLogger(__name__)

GENERATOR_ALIASES = {"ba": "preferential_attachment", "ws": "small_world", "er": "erdos_renyi"}
FILTER_CHOICES = {"voters": AnalysisFilter.VOTERS_ONLY, "all": AnalysisFilter.ALL,
                  "against": AnalysisFilter.NONVOTERS_AS_AGAINST,
                  "independents": AnalysisFilter.INDEPENDENTS_ONLY}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# manifest and writers


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    seed: int
    version: str
    input_digests: dict
    started: str
    finished: str = None

    def finish(self):
        self.finished = _now()
        return self

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "input_digests": self.input_digests,
            "timestamps": {"started": self.started, "finished": self.finished},
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def file_digest(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return None if np.isnan(value) else value
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload: dict, manifest: RunManifest):
    payload = dict(payload)
    payload["manifest"] = manifest.finish().to_dict()
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %s", path)


def write_csv_rows(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    log.info("wrote %s", path)


# ---------------------------------------------------------------------------
# tiny SVG scatter


def svg_scatter(path, points, xlabel, ylabel, title, fit_line=True):
    """Data-faithful scatter with an optional least-squares line."""
    width, height, margin = 480, 360, 52
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    x_lo, x_hi = xs.min(), xs.max()
    y_lo, y_hi = ys.min(), ys.max()
    x_pad = (x_hi - x_lo) or 1.0
    y_pad = (y_hi - y_lo) or 1.0
    x_lo, x_hi = x_lo - 0.05 * x_pad, x_hi + 0.05 * x_pad
    y_lo, y_hi = y_lo - 0.05 * y_pad, y_hi + 0.05 * y_pad

    def sx(v):
        return margin + (v - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="11">{xlabel}</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="11" '
        f'transform="rotate(-90 14 {height / 2:.1f})">{ylabel}</text>',
        f'<text x="{margin}" y="{height - margin + 14}" font-size="9" text-anchor="middle">{x_lo:.2f}</text>',
        f'<text x="{width - margin}" y="{height - margin + 14}" font-size="9" text-anchor="middle">{x_hi:.2f}</text>',
        f'<text x="{margin - 6}" y="{height - margin}" font-size="9" text-anchor="end">{y_lo:.2f}</text>',
        f'<text x="{margin - 6}" y="{margin + 4}" font-size="9" text-anchor="end">{y_hi:.2f}</text>',
    ]
    if fit_line and np.ptp(xs) > 0:
        fit = ols_simple(xs, ys)
        xa, xb = xs.min(), xs.max()
        parts.append(f'<line x1="{sx(xa):.2f}" y1="{sy(fit.predict(xa)):.2f}" '
                     f'x2="{sx(xb):.2f}" y2="{sy(fit.predict(xb)):.2f}" '
                     f'stroke="#888" stroke-dasharray="5,4"/>')
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3.2" '
                     f'fill="#1f6fb2" fill-opacity="0.75"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    log.info("wrote %s", path)


# ---------------------------------------------------------------------------
# subcommands


def _split_choice(value, universe, aliases=None):
    if value == "all":
        return tuple(universe)
    name = (aliases or {}).get(value, value)
    if name not in universe:
        raise _UsageError(f"unknown choice {value!r}")
    return (name,)


def cmd_simulate(args) -> int:
    config = StudyConfig(
        generators=_split_choice(args.generator, GENERATORS, GENERATOR_ALIASES),
        distributions=_split_choice(args.weights, DISTRIBUTIONS),
        replicates=args.replicates,
        variations=args.variations,
        individuals=args.individuals,
        node_count=args.nodes,
        normal_sd=args.normal_sd,
        thresholds_per=args.thresholds_per,
        seed=args.seed,
    )
    manifest = RunManifest("simulate", config.to_dict(), args.seed, __version__, {}, _now())
    report = run_study(config, jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    write_json(os.path.join(args.out, "simulation_report.json"),
               report.to_json_dict(include_replicates=args.audit), manifest)
    write_csv_rows(os.path.join(args.out, "simulation_table.csv"), report.table_rows())
    if args.svg:
        for combo in report.combinations:
            if not combo.replicates_used:
                continue
            rep = nearest_to_mean(report, combo.generator, combo.distribution)
            stem = f"scatter_{combo.generator}_{combo.distribution}"
            svg_scatter(os.path.join(args.out, stem + "_connectivity.svg"),
                        list(zip(rep.connectivities, rep.impacts)),
                        "connectivity (ASPL)", "average impact",
                        f"{combo.generator} x {combo.distribution} (r={rep.conn_impact_r:.2f})")
            svg_scatter(os.path.join(args.out, stem + "_centrality.svg"),
                        [(p[0], p[1]) for p in rep.centrality_pairs],
                        "standardized closeness", "standardized impact",
                        f"{combo.generator} x {combo.distribution} (r={rep.cent_impact_r:.2f})")
    for combo in report.combinations:
        print(f"{combo.generator} x {combo.distribution}: "
              f"connectivity/impact mean r={combo.conn_impact_mean:+.3f} "
              f"(sd {combo.conn_impact_sd:.3f}), "
              f"centrality/impact mean r={combo.cent_impact_mean:+.3f} "
              f"(sd {combo.cent_impact_sd:.3f}) "
              f"[{combo.replicates_used} used, {combo.replicates_flagged} flagged]")
    return 0


def _parse_elements(arg):
    return tuple(arg.split(",")) if arg else None


def cmd_analyze(args) -> int:
    which = FILTER_CHOICES[args.filter]
    manifest = RunManifest("analyze", {"filter": args.filter, "input": args.input,
                                       "elements": args.elements,
                                       "compare_nonvoters": args.compare_nonvoters},
                           args.seed, __version__, {args.input: file_digest(args.input)}, _now())
    data = load_dataset(args.input)
    elements = _parse_elements(args.elements)
    analyses = analyze_all(data, which, elements)
    report = hypothesis_tests(analyses)
    os.makedirs(args.out, exist_ok=True)

    payload = {
        "analyses": [a.to_json_dict() for a in analyses],
        "hypothesis_tests": report.to_json_dict(),
    }
    if args.compare_nonvoters:
        voters = analyze_all(data, AnalysisFilter.VOTERS_ONLY, elements)
        nonvoters = analyze_all(data, AnalysisFilter.NONVOTERS_ONLY, elements)
        comparison = compare_groups(nonvoters, voters)
        payload["nonvoter_connectivity_comparison"] = {
            "groups": ["nonvoters", "voters"],
            **comparison.to_dict(),
        }
    write_json(os.path.join(args.out, "analysis_report.json"), payload, manifest)

    rows = [["election", "candidate", "n_before", "n_after", "connectivity_aspl",
             "average_impact", "small_sample"]]
    rows += [[a.election, a.candidate, a.n_before, a.n_after,
              f"{a.connectivity:.6f}", f"{a.average_impact:.6f}", int(a.small_sample)]
             for a in analyses]
    write_csv_rows(os.path.join(args.out, "candidate_analyses.csv"), rows)
    cent_rows = [["election", "candidate", "element", "z_closeness", "z_impact"]]
    cent_rows += [[e, c, el, f"{zc:.6f}", f"{zi:.6f}"]
                  for e, c, el, zc, zi in report.centrality_points]
    write_csv_rows(os.path.join(args.out, "centrality_points.csv"), cent_rows)

    if args.svg:
        svg_scatter(os.path.join(args.out, "connectivity_impact.svg"),
                    [(p[2], p[3]) for p in report.connectivity_points],
                    "connectivity (ASPL)", "average impact",
                    f"connectivity vs impact (r={report.connectivity_test.r:.2f})")
        svg_scatter(os.path.join(args.out, "centrality_impact.svg"),
                    [(p[3], p[4]) for p in report.centrality_points],
                    "standardized closeness", "standardized impact",
                    f"centrality vs impact (r={report.centrality_test.r:.2f})")
    print(f"networks: {len(analyses)}")
    print(f"connectivity/impact r={report.connectivity_test.r:+.3f} "
          f"(p={report.connectivity_test.p_value:.3g})")
    print(f"centrality/impact r={report.centrality_test.r:+.3f} "
          f"(p={report.centrality_test.p_value:.3g})")
    return 0


def cmd_forecast(args) -> int:
    digests = {args.input: file_digest(args.input)}
    if args.element_map:
        digests[args.element_map] = file_digest(args.element_map)
    manifest = RunManifest("forecast", {"target": args.target, "filter": args.filter,
                                        "input": args.input, "element_map": args.element_map,
                                        "per_candidate": args.per_candidate},
                           args.seed, __version__, digests, _now())
    data = load_dataset(args.input)
    element_map = load_element_map(args.element_map)
    which = FILTER_CHOICES[args.filter]
    if args.target == "all":
        report = forecast_all(data, element_map, which, args.per_candidate)
    else:
        report = forecast_impact(data, args.target, element_map, which, args.per_candidate)
    os.makedirs(args.out, exist_ok=True)
    write_json(os.path.join(args.out, "forecast_report.json"), report.to_json_dict(), manifest)
    report.write_csv(os.path.join(args.out, "forecast_rows.csv"))

    for name, summary in (("centrality forecast", report.centrality_deviation),
                          ("overall-mean baseline", report.overall_baseline_deviation),
                          ("element-mean baseline", report.element_baseline_deviation)):
        print(f"{name}: deviation median={summary['median']:.3f} "
              f"IQR={summary['iqr_low']:.3f}-{summary['iqr_high']:.3f}")
    for name, test in (("vs overall-mean", report.vs_overall_baseline),
                       ("vs element-mean", report.vs_element_baseline)):
        print(f"wilcoxon {name}: V={test.statistic:.0f} p={test.p_value:.3g} "
              f"CLES={100 * test.effect_size:.1f}%")
    return 0


def cmd_synth(args) -> int:
    if args.spec:
        with open(args.spec) as fh:
            try:
                spec = SynthSpec.from_dict(json.load(fh))
            except (KeyError, TypeError, ValueError) as err:
                raise SchemaError(f"{args.spec}: invalid synthetic spec: {err}") from err
        digests = {args.spec: file_digest(args.spec)}
    else:
        spec = SynthSpec(
            elections=tuple(str(1980 + 4 * i) for i in range(args.elections)),
            candidates_per_election=args.candidates,
            individuals=args.individuals,
            ordinal=args.ordinal,
            nonvoter_rate=args.nonvoter_rate,
            independent_rate=args.independent_rate,
        )
        digests = {}
    manifest = RunManifest("synth", spec.to_dict(), args.seed, __version__, digests, _now())
    rng = np.random.default_rng(args.seed)
    data = gen_synthetic_elections(spec, rng)
    out_dir = os.path.dirname(args.out) or "."
    os.makedirs(out_dir, exist_ok=True)
    write_dataset_csv(data, args.out)
    write_json(args.out + ".manifest.json",
               {"betas": {f"{e}/{c}": b for (e, c), b in data.synth_betas.items()},
                "output": args.out},
               manifest)
    print(f"wrote {args.out}: {len(data.elections)} elections, "
          f"{sum(len(d.candidates) for d in data.elections.values())} candidate blocks")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="attnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="run the simulation study")
    sim.add_argument("--generator", default="all", choices=["ba", "ws", "er", "all"])
    sim.add_argument("--weights", default="all", choices=["normal", "pareto", "uniform", "all"])
    sim.add_argument("--replicates", type=int, default=100)
    sim.add_argument("--variations", type=int, default=20)
    sim.add_argument("--individuals", type=int, default=1000)
    sim.add_argument("--nodes", type=int, default=11)
    sim.add_argument("--normal-sd", type=float, default=0.0075,
                     help="SD of the normal weight distribution")
    sim.add_argument("--thresholds-per", default="variation", choices=["variation", "replicate"])
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--jobs", type=int, default=1)
    sim.add_argument("--out", default=".")
    sim.add_argument("--svg", action="store_true")
    sim.add_argument("--audit", action="store_true",
                     help="include per-replicate raw values in the JSON report")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="analyse a survey CSV")
    ana.add_argument("input")
    ana.add_argument("--filter", default="voters", choices=sorted(FILTER_CHOICES))
    ana.add_argument("--elements", default=None,
                     help="comma-separated element subset, e.g. e01,e02,e03")
    ana.add_argument("--compare-nonvoters", action="store_true",
                     help="also compare voter vs non-voter connectivity")
    ana.add_argument("--seed", type=int, default=0)
    ana.add_argument("--out", default=".")
    ana.add_argument("--svg", action="store_true")
    ana.set_defaults(func=cmd_analyze)

    fct = sub.add_parser("forecast", help="leave-one-election-out impact forecast")
    fct.add_argument("input")
    fct.add_argument("--target", required=True, help="election id, or 'all' for the full sweep")
    fct.add_argument("--element-map", default=None)
    fct.add_argument("--filter", default="voters", choices=sorted(FILTER_CHOICES))
    fct.add_argument("--per-candidate", action="store_true",
                     help="average per-network regressions instead of pooling")
    fct.add_argument("--seed", type=int, default=0)
    fct.add_argument("--out", default=".")
    fct.set_defaults(func=cmd_forecast)

    syn = sub.add_parser("synth", help="generate a synthetic election survey CSV")
    syn.add_argument("--spec", default=None, help="JSON spec file; overrides the flags below")
    syn.add_argument("--elections", type=int, default=9)
    syn.add_argument("--candidates", type=int, default=2)
    syn.add_argument("--individuals", type=int, default=1000)
    syn.add_argument("--ordinal", action="store_true")
    syn.add_argument("--nonvoter-rate", type=float, default=0.0)
    syn.add_argument("--independent-rate", type=float, default=0.0)
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--out", default="synthetic_elections.csv")
    syn.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("ATTNET_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 3
    except SystemExit as err:  # --help
        return 0 if not err.code else 3
    try:
        return args.func(args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 3
    except (ParameterError, ContractError, CapacityError) as err:
        print(f"parameter error: {err}", file=sys.stderr)
        return 3
    except DegenerateDataError as err:
        print(f"degenerate data: {err}", file=sys.stderr)
        return 1
    except (SchemaError, ConfigurationError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2
    except AttnetError as err:  # pragma: no cover - safety net
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
