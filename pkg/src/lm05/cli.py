"""Command-line entry point: ``lm05 {individual,collective,compare,montecarlo,validate}``.

Every command writes CSV (12 significant digits, fixed header) to ``--out``
or stdout. Exit codes: 0 success, 1 bad arguments, 2 numerical or
validation failure.
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .channels import UnsupportedCombinationError, check_supported
from .collective import InternalConsistencyError, collective_curve, protocol_comparison
from .individual import detection_threshold, individual_curve
from .montecarlo import (
    NoiseSpec,
    SimConfig,
    closed_form_targets,
    simulate,
    z_scores,
)
from .qudit import NumericalDomainError
from .validation import format_report, run_all

EXIT_OK, EXIT_ARGS, EXIT_NUMERIC = 0, 1, 2

INDIVIDUAL_COLUMNS = ["d", "theta", "pdet_min", "I_AB", "I_AE", "I_BE", "r", "r_reg"]
THRESHOLD_COLUMNS = ["d", "pdet_min_threshold"]
COLLECTIVE_COLUMNS = [
    "kind", "mode", "d", "p", "Qk_theta0", "Qt_theta0", "Qk_theta1", "Qt_theta1",
    "qder_abscissa", "r", "r_reg",
]
COMPARE_COLUMNS = ["protocol", "d_base", "p", "Qk", "rate_bits"]
MONTECARLO_COLUMNS = [
    "scope", "rounds", "n_message", "Qk_hat", "Qk_se", "Qk_target", "n_check",
    "Qt_hat", "Qt_se", "Qt_target", "Qt_back_hat", "Pdet_hat", "Pdet_se", "Pdet_target",
    "PAB_hat",
]


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not np.isfinite(v):
        raise NumericalDomainError(f"non-finite value {v!r} in output")
    # map -0.0 to 0.0 so outputs compare byte-for-byte
    return format(v if v != 0 else 0.0, ".12g")


def write_csv(path, header, rows):
    text_rows = [[_fmt(v) for v in row] for row in rows]
    if path in (None, "-"):
        _emit(sys.stdout, header, text_rows)
    else:
        with open(path, "w", newline="") as fh:
            _emit(fh, header, text_rows)


def _emit(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _int_list(text):
    try:
        vals = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty dimension list")
    return vals


def _grid(lo, hi, count, domain, name):
    if count < 2:
        raise ArgumentError(f"--{name}-count must be at least 2")
    if not (domain[0] <= lo < hi <= domain[1] + 1e-12):
        raise ArgumentError(f"{name} bounds must satisfy {domain[0]} <= min < max <= {domain[1]:.6g}")
    return np.linspace(lo, hi, count)


def _check_dims(dims, lo, hi, what):
    bad = [d for d in dims if not lo <= d <= hi]
    if bad:
        raise ArgumentError(f"{what} dimensions must lie in [{lo}, {hi}], got {bad}")


# --------------------------------------------------------------------------- #

def cmd_individual(args):
    _check_dims(args.dims, 2, 16, "individual")
    thetas = _grid(args.theta_min, args.theta_max, args.theta_count, (0.0, np.pi / 2), "theta")
    rows = []
    for d in args.dims:
        for pt in individual_curve(d, thetas):
            mi = pt.triple
            rows.append([d, pt.theta, pt.pdet_min, mi.I_AB, mi.I_AE, mi.I_BE, pt.r, pt.r_reg])
    write_csv(args.out, INDIVIDUAL_COLUMNS, rows)

    thr_rows = []
    for d in args.dims:
        res = detection_threshold(d)
        thr_rows.append([d, res.pdet_min])
        if not res.crossed:
            print(f"d={d}: I_AB > I_AE on the whole angle range; threshold is the range end",
                  file=sys.stderr)
    write_csv(_threshold_path(args), THRESHOLD_COLUMNS, thr_rows)
    return EXIT_OK


def _threshold_path(args):
    if args.threshold_out:
        return args.threshold_out
    if args.out in (None, "-"):
        sys.stdout.write("\n")
        return "-"
    p = Path(args.out)
    return str(p.with_name(p.stem + "_threshold" + (p.suffix or ".csv")))


def cmd_collective(args):
    try:
        kind, mode = check_supported(args.kind, args.mode)
    except UnsupportedCombinationError as exc:
        raise ArgumentError(str(exc)) from None
    _check_dims(args.dims, 2, 64, "collective")
    ps = _grid(args.p_min, args.p_max, args.p_count, (0.0, 1.0), "p")
    rows = []
    for d in args.dims:
        for pt in collective_curve(kind, mode, d, ps):
            rows.append([
                kind.value, mode.value, d, pt.p, pt.Q_k[0], pt.Q_t[0], pt.Q_k[1], pt.Q_t[1],
                pt.qder_abscissa, pt.r, pt.r_reg,
            ])
    write_csv(args.out, COLLECTIVE_COLUMNS, rows)
    return EXIT_OK


def cmd_compare(args):
    try:
        kind, mode = check_supported(args.kind, args.mode)
    except UnsupportedCombinationError as exc:
        raise ArgumentError(str(exc)) from None
    _check_dims([args.d], 2, 6, "compare")
    ps = _grid(args.p_min, args.p_max, args.p_count, (0.0, 1.0), "p")
    two, sq = protocol_comparison(kind, mode, args.d, ps)
    rows = []
    for curve in (two, sq):
        for p, q, r in zip(curve.param, curve.x, curve.y):
            rows.append([curve.label, args.d, p, q, r])
    write_csv(args.out, COMPARE_COLUMNS, rows)
    return EXIT_OK


def cmd_montecarlo(args):
    try:
        noise = NoiseSpec.parse(args.noise) if args.noise else None
        config = SimConfig(
            d=args.d, rounds=args.rounds, seed=args.seed, check_prob=args.check_prob,
            noise=noise, cloning_theta=args.cloning, encoding=args.encoding,
        )
    except ValueError as exc:
        raise ArgumentError(str(exc)) from None
    stats = simulate(config, workers=args.workers)
    targets = closed_form_targets(config)
    write_csv(args.out, MONTECARLO_COLUMNS, montecarlo_rows(stats, targets))

    z = z_scores(stats, targets)
    worst = max(float(np.max(v)) for v in z.values())
    verdict = "within" if worst <= 4 else "OUTSIDE"
    print(f"max |z| = {worst:.3f}: {verdict} 4 standard errors of the closed-form targets",
          file=sys.stderr)
    return EXIT_OK


def montecarlo_rows(stats, targets):
    """Pooled row followed by one row per preparation basis."""
    def tgt(name, b=None):
        if name not in targets:
            return ""
        v = np.atleast_1d(targets[name])
        if b is None:
            return float(v[0]) if v.size == 1 else ""
        return float(v[b]) if v.size > 1 else ""

    def pooled(num, den):
        return float(num.sum() / den.sum()) if den.sum() else 0.0

    def se(p, n):
        return float(np.sqrt(p * (1 - p) / max(n, 1)))

    qk = pooled(stats.message_errors, stats.n_message)
    qt = pooled(stats.check_fwd_errors, stats.n_check)
    rows = [[
        "all", stats.rounds, int(stats.n_message.sum()), qk, se(qk, stats.n_message.sum()), "",
        int(stats.n_check.sum()), qt, se(qt, stats.n_check.sum()), "",
        pooled(stats.check_bwd_errors, stats.n_check), stats.P_det_hat,
        float(stats.stderr("P_det_hat")), tgt("P_det_hat"), 1.0 - qk,
    ]]
    pdet_b = stats.detections / np.maximum(stats.n_check, 1)
    for b, name in enumerate(("computational", "fourier")):
        rows.append([
            name, "", int(stats.n_message[b]), stats.Q_k_hat[b], stats.stderr("Q_k_hat")[b],
            tgt("Q_k_hat", b), int(stats.n_check[b]), stats.Q_t_hat[b],
            stats.stderr("Q_t_hat")[b], tgt("Q_t_hat", b), stats.Q_t_back_hat[b],
            pdet_b[b], se(pdet_b[b], stats.n_check[b]), "", stats.P_AB_hat[b],
        ])
    return rows


def cmd_validate(args):
    results = run_all()
    print(format_report(results))
    failed = [r.name for r, _ in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


# --------------------------------------------------------------------------- #

def build_parser():
    parser = _Parser(prog="lm05", description="Two-way qudit QKD key rates and checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("individual", help="cloning-attack key rates and detection thresholds")
    p.add_argument("--dims", type=_int_list, default=[2, 3, 4, 7])
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=np.pi / 2)
    p.add_argument("--theta-count", type=int, default=100)
    p.add_argument("--out", default="-")
    p.add_argument("--threshold-out", default=None,
                   help="threshold table path (default: <out>_threshold.csv, or stdout after a blank line)")
    p.set_defaults(func=cmd_individual)

    for name, func, helptext in (
        ("collective", cmd_collective, "collective-attack key rates against noise strength"),
        ("compare", cmd_compare, "two d-dimensional runs against one d^2-dimensional run"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--kind", required=True, help="depolarizing|dit-phase-flip|amplitude-damping (or dep|dpf|adc)")
        p.add_argument("--mode", default="independent", help="independent|correlated (or ind|corr)")
        if name == "collective":
            p.add_argument("--dims", type=_int_list, default=[3, 5, 8, 10])
        else:
            p.add_argument("--d", type=int, default=3)
        p.add_argument("--p-min", type=float, default=0.0)
        p.add_argument("--p-max", type=float, default=1.0)
        p.add_argument("--p-count", type=int, default=101)
        p.add_argument("--out", default="-")
        p.set_defaults(func=func)

    p = sub.add_parser("montecarlo", help="round-by-round protocol simulation")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rounds", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--noise", help="kind:mode:p, e.g. dep:ind:0.3")
    src.add_argument("--cloning", type=float, metavar="THETA", help="ancilla overlap angle in [0, pi/2]")
    p.add_argument("--check-prob", type=float, default=0.5)
    p.add_argument("--encoding", choices=("diagonal", "full"), default="diagonal")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("validate", help="run the self-check suite")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"lm05 {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (NumericalDomainError, InternalConsistencyError, FloatingPointError) as exc:
        print(f"lm05 {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"lm05 {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
