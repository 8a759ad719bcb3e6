"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 a physical
invariant (zero error, completeness, positivity, convexity) was violated.
"""
from __future__ import annotations

import argparse
import csv
import sys
from typing import Sequence

import numpy as np

from . import coherent, discrimination, simulate, states
from .errors import SymdiscError
from .numerics import max_eigenvalue, min_eigenvalue

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_INVARIANT = 0, 2, 3, 4


class InvariantViolation(Exception):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_complex_list(text: str) -> list[complex]:
    try:
        return [complex(tok.strip().replace(" ", "")) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse coefficient list {text!r}") from exc


def _parse_int_range(text: str) -> list[int]:
    """``"2-8"`` or ``"2,3,5"``."""
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def _add_state_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("state set (choose one)")
    g.add_argument("--coeffs", type=_parse_complex_list, help="canonical coefficients c_0,...,c_{N-1}")
    g.add_argument("--theta", type=float, help="two-state angle in [0, pi/4]")
    g.add_argument("--coherent", action="store_true", help="symmetric coherent states")
    g.add_argument("--n", type=int, default=None, help="number of coherent states")
    g.add_argument("--alpha-sq", type=float, default=None, help="|alpha|^2 of the coherent family")
    g.add_argument("--alpha-re", type=float, default=None)
    g.add_argument("--alpha-im", type=float, default=None)
    p.add_argument("--tol-independence", type=float, default=states.INDEPENDENCE_TOL)


def _normalized(coeffs: list[complex]) -> np.ndarray:
    # typed coefficients are rarely normalized to 1e-9; rescale and say so
    c = np.asarray(coeffs, dtype=complex)
    norm_sq = float(np.sum(np.abs(c) ** 2))
    if norm_sq == 0.0:
        raise SymdiscError("coefficients are all zero")
    if abs(norm_sq - 1.0) > states.NORMALIZATION_TOL:
        print(f"note: rescaled coefficients (sum of |c_k|^2 was {norm_sq:.12g})", file=sys.stderr)
    return c / np.sqrt(norm_sq)


def _coherent_family(args) -> coherent.CoherentFamily:
    if args.n is None:
        raise SymdiscError("--coherent requires --n")
    if args.alpha_sq is not None:
        return coherent.CoherentFamily.from_alpha_sq(args.n, args.alpha_sq)
    if args.alpha_re is None and args.alpha_im is None:
        raise SymdiscError("--coherent requires --alpha-sq or --alpha-re/--alpha-im")
    return coherent.CoherentFamily(complex(args.alpha_re or 0.0, args.alpha_im or 0.0), args.n)


def _chosen(args) -> str:
    picked = [name for name, on in (("coeffs", args.coeffs is not None), ("theta", args.theta is not None),
                                    ("coherent", args.coherent)) if on]
    if len(picked) != 1:
        raise SymdiscError("specify exactly one of --coeffs, --theta, --coherent")
    return picked[0]


def _symmetric_set(args) -> states.SymmetricSet:
    kind = _chosen(args)
    if kind == "coeffs":
        return states.from_coefficients(_normalized(args.coeffs), tol=args.tol_independence)
    if kind == "theta":
        return states.two_state_from_angle(args.theta)
    return states.from_coefficients(
        np.sqrt(coherent.coefficient_moduli(_coherent_family(args), method="series")),
        tol=args.tol_independence,
    )


def cmd_bound(args) -> int:
    kind = _chosen(args)
    if kind == "coherent":
        moduli = coherent.coefficient_moduli(_coherent_family(args), method="series")
    else:
        moduli = _symmetric_set(args).moduli
    r = discrimination.weakest_component(moduli)
    print(f"N       {len(moduli)}")
    for k, m in enumerate(moduli):
        print(f"|c_{k}|^2  {_fmt(m)}")
    print(f"argmin  {r}")
    print(f"bound   {_fmt(discrimination.optimal_bound(moduli))}")
    return EXIT_OK


def cmd_idp(args) -> int:
    if (args.overlap is None) == (args.theta is None):
        raise SymdiscError("specify exactly one of --overlap, --theta")
    if args.theta is not None:
        s = states.two_state_from_angle(args.theta)
        overlap = complex(states.gram(s)[0, 1])
        print(f"overlap {_fmt(overlap.real)}")
        print(f"bound   {_fmt(discrimination.optimal_bound(s.moduli))}")
    else:
        overlap = args.overlap
    print(f"P_IDP   {_fmt(discrimination.idp_limit(overlap))}")
    return EXIT_OK


def cmd_povm(args) -> int:
    s = _symmetric_set(args)
    if args.probs is not None:
        probs = discrimination.ConditionalProbabilities([float(t) for t in args.probs.split(",")])
        kraus = discrimination.build_kraus(s, states.reciprocal_set(s), probs, tol=args.tol_psd)
        povm = discrimination.povm_from_kraus(kraus, tol=args.tol_psd)
    else:
        povm, bound = discrimination.optimal_povm(s, tol=args.tol_psd)
        probs = discrimination.ConditionalProbabilities.uniform(s.n, bound)
    completeness = povm.completeness_residual()
    zero_error = discrimination.zero_error_residual(povm, s, probs)
    lam = max_eigenvalue(povm.total_detection)
    ef_min = min_eigenvalue(povm.failure_element)
    print(f"N                      {s.n}")
    print(f"P_D                    {_fmt(probs.average)}")
    print(f"lambda_max(E_D)        {_fmt(lam)}")
    print(f"min eigenvalue of E_F  {_fmt(ef_min)}")
    print(f"completeness residual  {completeness:.3e}")
    print(f"zero-error residual    {zero_error:.3e}")
    if completeness > args.tol_residual or zero_error > args.tol_residual or ef_min < -args.tol_psd:
        raise InvariantViolation("POVM residuals exceed tolerance")
    return EXIT_OK


def _sweep_rows(table: coherent.SweepTable):
    for x, row, b, r in zip(table.grid, table.moduli, table.bound, table.argmin):
        yield [_fmt(x), *(_fmt(v) for v in row), _fmt(b), str(int(r))]


def cmd_coherent_sweep(args) -> int:
    grid = np.linspace(args.alpha_sq_min, args.alpha_sq_max, args.points)
    table = coherent.bound_vs_alpha(args.n, grid)
    header = ["alpha_sq", *(f"c2_{r}" for r in range(args.n)), "bound", "argmin"]
    if args.out == "-":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(_sweep_rows(table))
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(_sweep_rows(table))
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(grid)} rows to {args.out}")
    status = "yes" if table.nondecreasing else f"no (largest drop {table.max_decrease:.3e})"
    print(f"bound nondecreasing: {status}")
    return EXIT_OK


def cmd_crossings(args) -> int:
    found = coherent.find_crossings(args.n, args.max)
    if not found:
        print("no crossings")
        return EXIT_OK
    print("alpha_sq,outgoing,incoming")
    for c in found:
        print(f"{_fmt(c.alpha_sq)},{c.outgoing},{c.incoming}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = _symmetric_set(args)
    povm, bound = discrimination.optimal_povm(s, tol=args.tol_psd)
    report = simulate.run_trials(s, povm, args.trials, args.seed)
    print(f"analytic bound    {_fmt(bound)}")
    print(report.summary())
    print(f"within 5 sigma    {'yes' if report.within_5_sigma else 'no'}")
    if args.csv:
        try:
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["state", "correct", "wrong", "inconclusive"])
                writer.writerows([j, *map(int, row)] for j, row in enumerate(report.per_state))
        except OSError as exc:
            print(f"error: cannot write {args.csv}: {exc}", file=sys.stderr)
            return EXIT_IO
    if report.wrong:
        raise InvariantViolation(f"{report.wrong} wrong conclusive outcomes")
    return EXIT_OK


def cmd_convexity(args) -> int:
    slack = simulate.convexity_probe(args.dims, args.weights, args.cases, args.seed)
    print(f"cases       {args.cases}")
    print(f"worst slack {slack:.6e}")
    if slack < -args.tol_slack:
        raise InvariantViolation("largest eigenvalue failed the convexity inequality")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdisc",
        description="Optimal unambiguous discrimination of symmetric pure states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="optimal success probability N*min|c_r|^2")
    _add_state_args(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("idp", help="two-state limit 1 - |overlap|")
    p.add_argument("--overlap", type=complex)
    p.add_argument("--theta", type=float)
    p.set_defaults(func=cmd_idp)

    p = sub.add_parser("povm", help="construct and validate the measurement")
    _add_state_args(p)
    p.add_argument("--probs", help="conditional probabilities P_j (default: optimal)")
    p.add_argument("--tol-psd", type=float, default=discrimination.PSD_TOL)
    p.add_argument("--tol-residual", type=float, default=1e-9)
    p.set_defaults(func=cmd_povm)

    p = sub.add_parser("coherent-sweep", help="CSV of |c_r|^2 and the bound versus |alpha|^2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha-sq-min", type=float, default=0.0)
    p.add_argument("--alpha-sq-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=cmd_coherent_sweep)

    p = sub.add_parser("crossings", help="where the smallest |c_r|^2 changes index")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max", type=float, default=10.0)
    p.set_defaults(func=cmd_crossings)

    p = sub.add_parser("simulate", help="Monte Carlo run of the optimal measurement")
    _add_state_args(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--csv", help="write per-state tallies here")
    p.add_argument("--tol-psd", type=float, default=discrimination.PSD_TOL)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("convexity", help="random probe of lambda_max convexity")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--dims", type=_parse_int_range, default=list(range(2, 9)))
    p.add_argument("--weights", type=_parse_int_range, default=[2, 3, 4, 5])
    p.add_argument("--tol-slack", type=float, default=1e-10)
    p.set_defaults(func=cmd_convexity)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (SymdiscError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
