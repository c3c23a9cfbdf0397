"""Command-line entry point: ``morawetz run|sweep|verify-fields|selftest``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from morawetz import fields, harness, interaction
from morawetz.evolve import gaussian
from morawetz.grid import make_grid
from morawetz.reports import EstimateReport, inequality


def _cmd_run(args) -> int:
    flat = harness.load_config(args.config, args.set)
    sc = harness.scenario_from_flat(flat)
    res = harness.run_scenario(sc, args.out)
    for r in res.reports:
        print(r.line())
    print(f"# artifacts in {res.out_dir}")
    if res.aborted:
        print(f"# run aborted: {res.trace.abort_reason}", file=sys.stderr)
    return 0 if res.ok else 1


def _cmd_sweep(args) -> int:
    flat = harness.load_config(args.config, args.set)
    harness.scenario_from_flat(flat)  # validate the base before running anything
    values = [v for v in args.values.split(",") if v.strip()]
    res = harness.sweep(flat, args.axis, values, args.out)
    print(harness.sweep_table(res))
    return 0 if res.ok else 1


def field_identity_reports(count: int = 1000, seed: int = 0) -> list[EstimateReport]:
    """Identity and delta-limit checks for the four weight kinds."""
    eps = 0.1
    specs = {
        "radial3": fields.radial_weight(3, eps),
        "pair3d": fields.pair_weight_3d(eps),
        "line2d": fields.line_diagonal_weight_2d(fields.Line2D((0.2, -0.1), 0.6), eps),
        "diag1d": fields.diag_1d_weight(eps),
    }
    out = []
    for name, spec in specs.items():
        pts = fields.sample_points(spec, count, seed)
        rep = fields.verify_field_identities(spec, pts)
        for key, value, bound in rep.checks():
            out.append(inequality(f"{name}-{key}", value, bound, 0.0))
    for name, spec in (("radial3", specs["radial3"]), ("pair3d", specs["pair3d"]),
                       ("line2d", specs["line2d"])):
        table = fields.delta_limit_check(spec, 1.0, [1e-1, 1e-2, 1e-3])
        last = table.rows[-1]
        out.append(inequality(f"{name}-delta", last.rel_error, 1e-3, 0.0,
                              constant=spec.delta_constant,
                              context={"monotone": table.monotone}))
    return out


def selftest_reports() -> list[EstimateReport]:
    """Fast path versus brute-force oracle for every interaction action."""
    out = []
    g3 = make_grid(3, 8, 6.0)
    f3 = gaussian(g3, 1.0, 1.0, (0.3, -0.2, 0.1), (0.8, 0.4, -0.3))
    for eps in (0.0, 0.5):
        fast = interaction.interaction_action_3d(f3, eps)
        slow = interaction.interaction_action_3d_bruteforce(f3, eps)
        out.append(inequality(f"pair3d-eps{eps:g}", abs(fast - slow) / abs(slow), 1e-10, 0.0))
    g2 = make_grid(2, 12, 6.0)
    f2 = gaussian(g2, 1.0, 1.0, (0.3, -0.2), (0.8, 0.4))
    line = fields.Line2D((0.1, 0.2), 0.7)
    fast = interaction.interaction_action_2d(f2, line, 0.3)
    slow = interaction.interaction_action_2d_bruteforce(f2, line, 0.3)
    out.append(inequality("line2d", abs(fast - slow) / abs(slow), 1e-12, 0.0))
    g1 = make_grid(1, 16, 8.0)
    # A chirp gives non-uniform momentum; a pure boost makes M cancel to roundoff.
    f1 = gaussian(g1, 1.0, 1.0, (0.3,), (0.8,)) * np.exp(0.3j * g1.x1d**2)
    fast = interaction.interaction_action_1d(f1, 0.3)
    slow = interaction.interaction_action_1d_bruteforce(f1, 0.3)
    out.append(inequality("diag1d", abs(fast - slow) / abs(slow), 1e-12, 0.0))
    g2b = make_grid(2, 64, 16.0)
    fb = gaussian(g2b, 1.0, 1.5, (0.3, 0.2), (0.4, -0.3))
    avg = interaction.angular_average_weighted_l4(fb, None, 64, 0.0)
    direct = interaction.direct_weighted_l4(fb, None)
    out.append(inequality("angular-average", abs(avg - direct) / direct, 1e-2, 0.0))
    return out


def _print_reports(reports) -> int:
    for r in reports:
        print(r.line())
    failed = sum(r.failed for r in reports)
    print(f"# {len(reports) - failed}/{len(reports)} passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morawetz", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write trace/report/summary")
    run.add_argument("--config", required=True)
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    run.add_argument("--out", default=None, help="output directory (default runs/<name>)")
    run.set_defaults(func=_cmd_run)

    sw = sub.add_parser("sweep", help="refinement sweep over one numeric parameter")
    sw.add_argument("--config", required=True)
    sw.add_argument("--axis", required=True)
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    sw.add_argument("--out", default=None)
    sw.set_defaults(func=_cmd_sweep)

    vf = sub.add_parser("verify-fields", help="weight identity and delta-limit suite")
    vf.add_argument("--count", type=int, default=1000)
    vf.add_argument("--seed", type=int, default=0)
    vf.set_defaults(func=lambda a: _print_reports(field_identity_reports(a.count, a.seed)))

    st = sub.add_parser("selftest", help="fast kernels versus brute-force oracles")
    st.set_defaults(func=lambda a: _print_reports(selftest_reports()))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
