"""Command line interface.

Subcommands: ``fit``, ``estimate``, ``ci``, ``test``, ``gof`` and
``simulate``. Data come either from one long CSV (``--input``, header
``group,value``) or from two single-column files (``--x0``/``--x1``).
Every run with the same inputs, options and seed prints byte-identical
output. Exit codes: 0 on success, 2 on usage errors, 1 on computation
errors (message on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys

from .basis import make_basis
from .data import load_two_files, load_two_samples
from .drm import fit_theta
from .errors import DrmGiniError
from .gini import emp_gini, jel_gini, mele_gini
from .inference import (
    INTERVAL_METHODS,
    TEST_METHODS,
    AnalysisCache,
    compute_interval,
    compute_test,
    gof_test,
)
from .montecarlo import (
    PRESETS,
    ScenarioConfig,
    preset,
    run_ci_study,
    run_point_study,
    run_test_study,
)

SCHEMA_VERSION = 1


def _add_data_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="long CSV with header 'group,value'")
    p.add_argument("--x0", help="single-column file for group 0")
    p.add_argument("--x1", help="single-column file for group 1")
    p.add_argument("--basis", default="log",
                   choices=["log", "identity", "log+identity"],
                   help="tilt basis (default: log)")
    p.add_argument("--format", default="json", choices=["json", "tsv"])


def _load(args, parser: argparse.ArgumentParser):
    if args.input and (args.x0 or args.x1):
        parser.error("use either --input or --x0/--x1, not both")
    if args.input:
        return load_two_samples(args.input)
    if args.x0 and args.x1:
        return load_two_files(args.x0, args.x1)
    parser.error("provide --input or both --x0 and --x1")


def _emit_json(payload: dict, seed=None) -> str:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    if seed is not None:
        payload["seed"] = seed
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _kv_tsv(record: dict) -> str:
    lines = [f"{k}\t{record[k]}" for k in sorted(record)]
    return "\n".join(lines) + "\n"


def _table_tsv(rows: list[dict]) -> str:
    cols = []
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    lines = ["\t".join(cols)]
    for row in rows:
        lines.append("\t".join(str(row.get(c, "")) for c in cols))
    return "\n".join(lines) + "\n"


def _cmd_fit(args, parser):
    data = _load(args, parser)
    fit = fit_theta(data, make_basis(args.basis))
    summary = fit.summary_dict()
    if args.format == "tsv":
        flat = dict(summary)
        flat["theta_hat"] = ",".join(repr(v) for v in summary["theta_hat"])
        flat["nu_hat"] = ",".join(repr(v) for v in summary["nu_hat"])
        return _kv_tsv(flat)
    return _emit_json(summary)


def _cmd_estimate(args, parser):
    data = _load(args, parser)
    fit = fit_theta(data, make_basis(args.basis))
    records = [mele_gini(fit).to_dict(), emp_gini(data).to_dict(), jel_gini(data).to_dict()]
    if args.format == "tsv":
        flat = []
        for r in records:
            row = {k: r[k] for k in ("method", "g0", "g1", "diff")}
            flat.append(row)
        return _table_tsv(flat)
    return _emit_json({"estimates": records})


def _cmd_ci(args, parser):
    data = _load(args, parser)
    cache = AnalysisCache(data, make_basis(args.basis))
    methods = [m.strip().upper() for m in args.methods.split(",") if m.strip()]
    targets = [t.strip().upper() for t in args.targets.split(",") if t.strip()]
    rows = []
    for key, method in enumerate(methods):
        for target in targets:
            iv = compute_interval(cache, target, method, level=args.level,
                                  B=args.B, seed=args.seed, spawn_key=(key,))
            rows.append(iv.to_dict())
    if args.format == "tsv":
        return _table_tsv(rows)
    return _emit_json({"intervals": rows, "level": args.level}, seed=args.seed)


def _cmd_test(args, parser):
    data = _load(args, parser)
    cache = AnalysisCache(data, make_basis(args.basis))
    methods = [m.strip().upper() for m in args.methods.split(",") if m.strip()]
    rows = [compute_test(cache, m, level=args.level).to_dict() for m in methods]
    if args.format == "tsv":
        return _table_tsv(rows)
    return _emit_json({"tests": rows})


def _cmd_gof(args, parser):
    data = _load(args, parser)
    res = gof_test(data, make_basis(args.basis), B=args.B, seed=args.seed)
    if args.format == "tsv":
        return _kv_tsv(res.to_dict())
    return _emit_json(res.to_dict(), seed=args.seed)


def _cmd_simulate(args, parser):
    if args.preset:
        config = preset(args.preset)
        if args.basis:
            config = ScenarioConfig(config.family, nu=config.nu, n=config.n,
                                    params=config.params, basis=args.basis)
    else:
        if args.family is None:
            parser.error("provide --preset or --family")
        config = ScenarioConfig(
            args.family, nu=(args.nu0, args.nu1), n=(args.n0, args.n1),
            basis=args.basis or None,
        )
    methods = tuple(m.strip() for m in args.methods.split(",")) if args.methods else None
    if args.study == "point":
        summary = run_point_study(config, R=args.R, seed=args.seed,
                                  methods=methods or ("EMP", "JEL", "DRM"))
    elif args.study == "ci":
        summary = run_ci_study(config, R=args.R, seed=args.seed,
                               methods=methods or ("NA-DRM",), level=args.level,
                               B=args.B)
    else:
        summary = run_test_study(config, R=args.R, seed=args.seed,
                                 methods=methods or ("NA-DRM",),
                                 level=1.0 - args.level)
    if args.format == "tsv":
        return summary.to_tsv()
    return summary.to_json() + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drmgini",
        description="Gini index inference for two semicontinuous samples "
                    "linked by a density ratio model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit the tilt and print its summary")
    _add_data_options(p_fit)
    p_fit.set_defaults(func=_cmd_fit)

    p_est = sub.add_parser("estimate", help="point estimates by all methods")
    _add_data_options(p_est)
    p_est.set_defaults(func=_cmd_estimate)

    p_ci = sub.add_parser("ci", help="confidence intervals")
    _add_data_options(p_ci)
    p_ci.add_argument("--targets", default="G0,G1,DIFF")
    p_ci.add_argument("--methods", default="NA-DRM",
                      help="comma list from: " + ",".join(INTERVAL_METHODS))
    p_ci.add_argument("--level", type=float, default=0.95)
    p_ci.add_argument("--B", type=int, default=1000,
                      help="bootstrap replicates (bootstrap methods only)")
    p_ci.add_argument("--seed", type=int, default=None)
    p_ci.set_defaults(func=_cmd_ci)

    p_test = sub.add_parser("test", help="tests of equal Gini indices")
    _add_data_options(p_test)
    p_test.add_argument("--methods", default="NA-DRM",
                        help="comma list from: " + ",".join(TEST_METHODS))
    p_test.add_argument("--level", type=float, default=0.05)
    p_test.set_defaults(func=_cmd_test)

    p_gof = sub.add_parser("gof", help="bootstrap check of the density ratio link")
    _add_data_options(p_gof)
    p_gof.add_argument("--B", type=int, default=1000)
    p_gof.add_argument("--seed", type=int, default=None)
    p_gof.set_defaults(func=_cmd_gof)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo study")
    p_sim.add_argument("--preset", default=None,
                       help="named scenario, e.g. chisq-100-00 "
                            "(see drmgini.montecarlo.PRESETS)")
    p_sim.add_argument("--family", default=None, choices=["chisq", "exp"])
    p_sim.add_argument("--nu0", type=float, default=0.0)
    p_sim.add_argument("--nu1", type=float, default=0.0)
    p_sim.add_argument("--n0", type=int, default=100)
    p_sim.add_argument("--n1", type=int, default=100)
    p_sim.add_argument("--basis", default=None,
                       choices=["log", "identity", "log+identity"])
    p_sim.add_argument("--study", default="point", choices=["point", "ci", "test"])
    p_sim.add_argument("--R", type=int, default=2000)
    p_sim.add_argument("--methods", default=None)
    p_sim.add_argument("--level", type=float, default=0.95,
                       help="confidence level; test studies run at size 1-level")
    p_sim.add_argument("--B", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--format", default="json", choices=["json", "tsv"])
    p_sim.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args, parser)
    except DrmGiniError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
