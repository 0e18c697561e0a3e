"""Batch command-line interface: ``iwasawa-lp {msspace,lp,invariants,glue}``.

Exit codes: 0 success, 1 a hard failure (an interpolation check failed),
2 input error, 3 precondition failure, 4 precision exhausted/indeterminate.
Machine output (``--report record``) is canonical JSON and byte-deterministic.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .cyclo import PadicCharacter, finite_characters
from .distributions import GluingError
from .family import (CoherenceError, CompatibilityError, FamilyFixture, glue_family_lp,
                     interpolate_coefficients)
from .forms import load_form
from .iwasawa import IwasawaSeries, LambdaCycElement, mu_lambda_scan, weierstrass_prepare
from .modsym import SymbolError, build_space, charpoly, hecke_operator
from .padic import PrecisionError, PrecisionProfile, QpPoly
from .plfn import (InadmissibleError, PadicLFunction, build_lp_finite_slope, build_lp_ordinary,
                   check_interpolation, stabilize_pair)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION, EXIT_PRECISION = 0, 1, 2, 3, 4

CONVENTIONS = {
    "weight_chart": "W = (1+p)^(k-k0) - 1",
    "frobenius": "geometric: [sigma_q] = [q^-1], kappa([sigma_q]) = kappa(q)^-1",
    "sign": "sgn(j, phi) = (-1)^(j-1) phi(-1); branch omega^i uses sign (-1)^(i-1)",
    "basis": "eigen-symbol normalized by first nonzero Manin coordinate = 1",
    "measure": "ball a + p^n Z_p: P -> alpha^-n Phi_alpha(P(a - p^n z){a/p^n, oo})",
    "mellin_sign": "L_p(chi^j phi) = (-1)^(j-1) x [(-1)^j (j-1)! e_p tau(phi) L/((2 pi i)^j Omega)]",
    "window": "l = 1, l' = 1 + h unless --l is given",
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _provenance(args, prof: PrecisionProfile | None) -> dict:
    out = {"artifact_version": __version__, "command": args.command, "conventions": CONVENTIONS}
    if prof is not None:
        out["profile"] = {"p": prof.p, "cap_n": prof.cap_n, "series_cap": prof.series_cap,
                          "cyclo_level": prof.cyclo_level}
    return out


def _profile(args) -> PrecisionProfile:
    try:
        return PrecisionProfile(args.p, cap_n=args.prec, series_cap=args.series_cap)
    except ValueError as e:
        raise CliError(str(e), EXIT_INPUT) from e


def _emit(args, record: dict, table_lines: list[str]) -> None:
    if args.output:
        Path(args.output).write_text(json.dumps(record, sort_keys=True, indent=1) + "\n")
    if args.report == "record":
        sys.stdout.write(json.dumps(record, sort_keys=True, indent=1) + "\n")
    else:
        sys.stdout.write("\n".join(table_lines) + "\n")


# ---------------------------------------------------------------------------
# msspace

def cmd_msspace(args) -> int:
    if args.character not in ("trivial", "1"):
        raise CliError("only the trivial character is supported", EXIT_INPUT)
    try:
        space = build_space(args.N, args.k)
    except SymbolError as e:
        raise CliError(str(e), EXIT_INPUT) from e
    plus, minus = space.sign_dimensions()
    hecke = {}
    for ell in args.hecke:
        hecke[str(ell)] = [str(c) for c in charpoly(hecke_operator(space, ell))]
    rec = {"provenance": _provenance(args, None), "N": args.N, "k": args.k, "character": "trivial",
           "dimension": space.dimension, "cuspidal_dimension": space.cuspidal_dimension,
           "cuspidal_sign_dimensions": {"+": plus, "-": minus}, "hecke_charpolys": hecke}
    lines = [f"M_k(Gamma0({args.N})) symbols, k={args.k}",
             f"  dimension            {space.dimension}",
             f"  cuspidal dimension   {space.cuspidal_dimension}",
             f"  cuspidal (+, -)      ({plus}, {minus})"]
    for ell, cp in hecke.items():
        lines.append(f"  charpoly T_{ell} (low->high)  {' '.join(cp)}")
    _emit(args, rec, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# lp

def _characters(p: int, max_exp: int):
    return list(finite_characters(p, max_exp))


def cmd_lp(args) -> int:
    prof = _profile(args)
    try:
        fixture = load_form(args.form)
    except (FileNotFoundError, KeyError, ValueError) as e:
        raise CliError(str(e), EXIT_INPUT) from e
    try:
        symbols = fixture.symbols()
        forms = stabilize_pair(symbols, args.p, args.root)
    except (SymbolError, ValueError) as e:
        raise CliError(str(e), EXIT_PRECONDITION) from e
    try:
        if args.mode == "ordinary":
            L = build_lp_ordinary(forms, args.nmax, prof)
        else:
            L = build_lp_finite_slope(forms, args.h, args.nmax, prof, l=args.l)
    except (InadmissibleError, GluingError) as e:
        raise CliError(str(e), EXIT_PRECONDITION) from e
    except PrecisionError as e:
        raise CliError(str(e), EXIT_PRECISION) from e
    js = args.j or list(range(L.l, L.l_prime + 1))
    max_exp = args.max_conductor_exp if args.max_conductor_exp is not None else min(2, L.n_max + 1)
    reports = []
    for j in js:
        for phi in _characters(args.p, max_exp):
            try:
                reports.append(check_interpolation(L, forms, j, phi, prof))
            except (SymbolError, ValueError) as e:
                raise CliError(str(e), EXIT_INPUT) from e
    L.provenance["form"] = fixture.to_record()
    rec = {"provenance": _provenance(args, prof), "lp": L.to_record(),
           "interpolation": [r.to_record() for r in reports]}
    lines = [f"{fixture.label} at p={args.p}: {L.slope_class} L_p, h={L.h}, window {L.l}..{L.l_prime}, "
             f"n_max={L.n_max}, precision {L.precision}",
             "   j  conductor  tame  wild  verdict        digits"]
    for r in reports:
        lines.append(f"  {r.j:2d}  {r.phi.conductor:9d}  {r.phi.tame:4d}  {r.phi.wild_exp:4d}  "
                     f"{r.verdict:13s}  {r.certified_precision if r.certified_precision is not None else '-'}")
    _emit(args, rec, lines)
    if any(r.verdict == "fail" for r in reports):
        return EXIT_FAIL
    if L.precision <= 0:
        print(f"error: precision exhausted (L_p known to {L.precision} digits); raise --prec",
              file=sys.stderr)
        return EXIT_PRECISION
    return EXIT_OK


# ---------------------------------------------------------------------------
# invariants

def _load_branches(path: str) -> tuple[int, list]:
    try:
        rec = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read {path}: {e}", EXIT_INPUT) from e
    if "lp" in rec:
        rec = rec["lp"]
    try:
        if "slope_class" in rec:
            L = PadicLFunction.from_record(rec)
            return L.p, [None if b is None else IwasawaSeries(b, None) for b in L.branches]
        el = LambdaCycElement.from_record(rec)
        return el.p, list(el.branches)
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(f"{path}: not an L_p or Lambda-element record ({e})", EXIT_INPUT) from e


def cmd_invariants(args) -> int:
    p, branches = _load_branches(args.file)
    out, lines = [], [f"Iwasawa invariants of {args.file} (p={p})", "  branch   mu  lambda  certified"]
    code = EXIT_OK
    for i, f in enumerate(branches):
        if f is None:
            out.append({"branch": i, "status": "missing"})
            lines.append(f"  {i:6d}   missing")
            continue
        if args.series_cap and f.cap > args.series_cap:
            f = f.resize(args.series_cap)
        try:
            mu, lam = mu_lambda_scan(f)
            wd = weierstrass_prepare(f)
            if (wd.mu, wd.lam) != (mu, lam):  # pragma: no cover - two derivations must agree
                raise CliError(f"branch {i}: scan and preparation disagree", EXIT_FAIL)
            out.append({"branch": i, "mu": mu, "lambda": lam, "certified_digits": wd.certified_digits})
            lines.append(f"  {i:6d}  {mu:3d}  {lam:6d}  {wd.certified_digits:9d}")
        except PrecisionError as e:
            out.append({"branch": i, "status": "indeterminate", "reason": str(e)})
            lines.append(f"  {i:6d}   indeterminate ({e})")
            code = EXIT_PRECISION
    rec = {"provenance": _provenance(args, None), "p": p, "invariants": out}
    _emit(args, rec, lines)
    return code


# ---------------------------------------------------------------------------
# glue

def cmd_glue(args) -> int:
    try:
        fixture = FamilyFixture.from_record(json.loads(Path(args.family).read_text()))
    except (OSError, json.JSONDecodeError, AttributeError, KeyError, TypeError, ValueError) as e:
        raise CliError(f"cannot read family fixture: {e}", EXIT_INPUT) from e
    per_weight = {}
    for path in args.lp_files:
        try:
            rec = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise CliError(f"cannot read {path}: {e}", EXIT_INPUT) from e
        try:
            L = PadicLFunction.from_record(rec.get("lp", rec))
        except (AttributeError, KeyError, TypeError, ValueError) as e:
            raise CliError(f"{path}: not an L_p record ({e})", EXIT_INPUT) from e
        k = L.provenance.get("weight")
        if k is None:
            raise CliError(f"{path}: provenance lacks the weight", EXIT_INPUT)
        per_weight[int(k)] = L
    report = {}
    try:
        if len(fixture.members) >= 2:
            fam = interpolate_coefficients(fixture)
            report["coefficient_divided_difference_valuations"] = {
                str(n): [("inf" if v == float("inf") else v) for v in vals]
                for n, vals in sorted(fam.divided_differences.items())}
        two = glue_family_lp(per_weight, fixture.disc, args.h)
    except (CompatibilityError, CoherenceError) as e:
        raise CliError(f"{e} (pair {e.pair})", EXIT_PRECONDITION) from e
    except ValueError as e:
        raise CliError(str(e), EXIT_INPUT) from e
    nodes = []
    for k in two.S:
        fib = two.fibre(k)
        ok = all(a is None or a.equal_at(b.resize(len(a)))
                 for a, b in zip(fib.branches, per_weight[k].branches))
        nodes.append({"k": k, "restricts_to_input": ok})
    rec = {"provenance": _provenance(args, None), "two_variable": two.to_record(), "nodes": nodes,
           "report": report}
    lines = [f"glued {len(two.S)} weights {list(two.S)} modulo J, precision {two.precision}"]
    lines += [f"  k={n['k']}: restricts to input: {n['restricts_to_input']}" for n in nodes]
    _emit(args, rec, lines)
    return EXIT_OK if all(n["restricts_to_input"] for n in nodes) else EXIT_FAIL


# ---------------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwasawa-lp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("table", "record"), default="table")
    common.add_argument("-o", "--output", help="write the machine record to this file")
    prec = argparse.ArgumentParser(add_help=False)
    prec.add_argument("--p", type=int, required=True, help="odd prime")
    prec.add_argument("--prec", type=int, default=20, help="p-adic digits (absolute)")
    prec.add_argument("--series-cap", type=int, default=60, help="power-series truncation")
    sub = parser.add_subparsers(dest="command", required=True)

    ms = sub.add_parser("msspace", parents=[common], help="build a modular-symbol space")
    ms.add_argument("--N", type=int, required=True)
    ms.add_argument("--k", type=int, required=True)
    ms.add_argument("--character", default="trivial")
    ms.add_argument("--hecke", type=_int_list, default=[], help="primes l for T_l charpolys, e.g. 2,3")
    ms.set_defaults(func=cmd_msspace)

    lp = sub.add_parser("lp", parents=[common, prec], help="construct L_p and check interpolation")
    lp.add_argument("--form", required=True, help="builtin label (11a, Delta) or JSON fixture")
    lp.add_argument("--root", default="small", choices=("small", "unit", "large"))
    lp.add_argument("--mode", default="ordinary", choices=("ordinary", "slope"))
    lp.add_argument("--h", type=int, default=0)
    lp.add_argument("--l", type=int, default=1, help="lowest twist of the gluing window")
    lp.add_argument("--nmax", type=int, default=3)
    lp.add_argument("--j", type=_int_list, default=None, help="twists to check, e.g. 1,2,3")
    lp.add_argument("--max-conductor-exp", type=int, default=None)
    lp.set_defaults(func=cmd_lp)

    inv = sub.add_parser("invariants", parents=[common], help="mu/lambda per branch")
    inv.add_argument("file")
    inv.add_argument("--series-cap", type=int, default=None)
    inv.set_defaults(func=cmd_invariants)

    gl = sub.add_parser("glue", parents=[common], help="glue per-weight L_p files over a weight disc")
    gl.add_argument("--family", required=True, help="family fixture JSON")
    gl.add_argument("--h", type=int, default=None)
    gl.add_argument("lp_files", nargs="+")
    gl.set_defaults(func=cmd_glue)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.code
    except PrecisionError as e:
        sys.stderr.write(f"precision: {e}\n")
        return EXIT_PRECISION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
