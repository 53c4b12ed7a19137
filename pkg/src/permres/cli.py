"""Command-line front end.

Exit statuses: 0 success, 1 input error, 2 impossible (the property provably
fails), 3 a search bound was exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .cohomology import cohomology, is_coflasque, is_projective, is_projective_cyclic
from .fileformat import (
    FormatError,
    ProblemFile,
    certificate_to_json,
    dumps,
    matrix_to_json,
    parse_certificate,
    parse_problem,
    verify_loaded,
    _perm_structure_to_json,
)
from .groups import FiniteGroup, Subgroup
from .modules import FiniteModule, ModuleError
from .presentation import (
    DEFAULT_STABILIZE_BOUND,
    PresentationRefused,
    UndecidedError,
    emit_invariant_matrix,
    obstruction,
    permutation_resolution,
    permutation_summand,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_IMPOSSIBLE = 2
EXIT_BOUNDS = 3

PREDICATES = ("coflasque", "projective", "perm-projective", "obstruction")


class InputError(Exception):
    pass


def _load(path: str) -> ProblemFile:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: cannot read file ({e.strerror})") from None
    try:
        return parse_problem(text)
    except FormatError as e:
        raise InputError(f"{path}: {e}") from None


def _describe_subgroup(k: int, H: Subgroup) -> str:
    return f"subgroup #{k} of order {H.order} {{{', '.join(map(str, H.elements))}}}"


def _select_subgroup(G: FiniteGroup, k: Optional[int]) -> tuple[str, Optional[Subgroup]]:
    subs = G.all_subgroups
    if k is None:
        return f"the whole group of order {G.order}", None
    if not 0 <= k < len(subs):
        listing = "; ".join(_describe_subgroup(i, H) for i, H in enumerate(subs))
        raise InputError(f"--subgroup must be between 0 and {len(subs) - 1}; subgroups are: {listing}")
    return _describe_subgroup(k, subs[k]), subs[k]


def _emit(out, text: str) -> None:
    print(text, file=out)


def cmd_cohomology(args, out) -> int:
    pf = _load(args.file)
    what, H = _select_subgroup(pf.group, args.subgroup)
    degree = 1 if args.degree is None else args.degree
    if degree < 0:
        raise InputError("--degree must be non-negative")
    c = cohomology(pf.module, degree, subgroup=H)
    _emit(out, f"{c}")
    _emit(out, f"  group: {pf.group.name or pf.group.order}, over {what}; method: {c.method}")
    return EXIT_OK


def _check_lattice(pf: ProblemFile, pred: str) -> None:
    if not pf.module.is_lattice:
        raise InputError(f"predicate {pred!r} applies to lattices; this module has relations")


def cmd_check(args, out) -> int:
    pf = _load(args.file)
    G, M = pf.group, pf.module
    preds = [args.predicate] if args.predicate else (
        ["coflasque", "projective", "perm-projective"] if M.is_lattice else ["obstruction"])
    status = EXIT_OK
    for pred in preds:
        if pred == "coflasque":
            _check_lattice(pf, pred)
            rep = is_coflasque(M)
            if rep:
                _emit(out, "coflasque: yes")
            else:
                fails = sorted(rep.failures, key=lambda f: -f[0].order)
                where = "; ".join(f"{c} on {_describe_subgroup(G.all_subgroups.index(H), H)}" for H, c in fails)
                _emit(out, f"coflasque: no ({where})")
                status = max(status, EXIT_IMPOSSIBLE)
        elif pred == "projective":
            _check_lattice(pf, pred)
            if G.is_cyclic():
                rep = is_projective_cyclic(M)
                ok = bool(rep)
                detail = "" if ok else f" ({rep.failures[0][1]} on subgroup of order {rep.failures[0][0].order})"
            else:
                ok = is_projective(M)
                detail = "" if ok else " (nonzero cohomology on a Sylow subgroup)"
            _emit(out, f"projective: {'yes' if ok else 'no'}{detail}")
            if not ok:
                status = max(status, EXIT_IMPOSSIBLE)
        elif pred == "perm-projective":
            _check_lattice(pf, pred)
            try:
                sm = permutation_summand(M)
            except PresentationRefused as e:
                _emit(out, f"perm-projective: no ({e.reason})")
                status = max(status, EXIT_IMPOSSIBLE)
                continue
            except UndecidedError as e:
                _emit(out, f"perm-projective: undecided ({e})")
                status = max(status, EXIT_BOUNDS)
                continue
            where = ""
            if args.out:
                doc = {"kind": "permutation-summand-witness",
                       "cover": _perm_structure_to_json(sm.cover),
                       "projection": matrix_to_json(sm.projection),
                       "section": matrix_to_json(sm.section)}
                Path(args.out).write_text(dumps(doc) + "\n")
                where = f"; witness written to {args.out}"
            _emit(out, f"perm-projective: yes (summand of a permutation lattice of rank {sm.cover.rank}{where})")
        elif pred == "obstruction":
            rep = obstruction(M)
            if rep.annihilated:
                _emit(out, f"obstruction: pass ({rep.h1}, annihilated by the exponent {rep.exponent}; "
                           f"{rep.verdict})")
            else:
                _emit(out, f"obstruction: FAIL ({rep.h1} is not annihilated by the exponent "
                           f"{rep.exponent}; presentation impossible)")
                status = max(status, EXIT_IMPOSSIBLE)
    return status


def cmd_present(args, out) -> int:
    pf = _load(args.file)
    M = pf.module
    if not isinstance(M, FiniteModule):
        raise InputError("present needs a finite module")
    bound = DEFAULT_STABILIZE_BOUND if args.stabilize_bound is None else args.stabilize_bound
    try:
        cert = permutation_resolution(M, stabilize_bound=bound)
    except PresentationRefused as e:
        _emit(out, f"impossible: {e.reason}")
        return EXIT_IMPOSSIBLE
    except ModuleError as e:
        if "above the bound" in str(e):
            _emit(out, f"bounds exhausted: {e}")
            return EXIT_BOUNDS
        raise
    target = Path(args.out) if args.out else Path(args.file).with_suffix(".cert.json")
    target.write_text(dumps(certificate_to_json(cert)) + "\n")
    _emit(out, f"certificate written to {target}")
    _emit(out, f"  0 -> N_M (rank {cert.P1.rank}) -> Z[M] (rank {cert.P0.rank}) -> M -> 0; "
               f"N_M is a summand of a permutation lattice of rank "
               f"{cert.summand.cover.rank if cert.summand else 0}")
    if cert.stabilization is None:
        _emit(out, f"bounds exhausted: no isomorphism Z[M] + E = N_M + E found for E up to "
                   f"{bound} copies of each coset module; no square matrix emitted")
        return EXIT_BOUNDS
    A, X = emit_invariant_matrix(cert)
    base = target.name[:-len(".cert.json")] if target.name.endswith(".cert.json") else target.stem
    mpath = target.with_name(base + ".matrix.json")
    mdoc = {"kind": "invariant-square-matrix", "basis": _perm_structure_to_json(X), "matrix": matrix_to_json(A)}
    mpath.write_text(dumps(mdoc) + "\n")
    _emit(out, f"square invariant matrix of size {A.rows} written to {mpath}")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as e:
        raise InputError(f"{args.file}: cannot read file ({e.strerror})") from None
    try:
        lc = parse_certificate(text)
    except FormatError as e:
        raise InputError(f"{args.file}: {e}") from None
    failures = verify_loaded(lc)
    if failures:
        _emit(out, "verify: FAIL")
        for f in failures:
            _emit(out, f"  - {f}")
        return EXIT_INPUT
    extra = "" if lc.certificate.stabilization is None else " (including the square matrix)"
    _emit(out, f"verify: pass{extra}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error status, not argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="permres", description="Permutation resolutions of finite group modules.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("file", metavar="FILE")
        return sp

    c = common(sub.add_parser("cohomology", help="cohomology groups H^d(H, M)"))
    c.add_argument("--subgroup", type=int, metavar="k", help="index into the subgroup list (sorted by order)")
    c.add_argument("--degree", type=int, metavar="d", help="cohomological degree (default 1)")

    c = common(sub.add_parser("check", help="test a module property"))
    c.add_argument("--predicate", choices=PREDICATES)
    c.add_argument("--out", metavar="path", help="where to write a perm-projective witness")

    c = common(sub.add_parser("present", help="build a permutation presentation certificate"))
    c.add_argument("--stabilize-bound", type=int, metavar="B",
                   help=f"max copies of each coset module in the stabilizer (default {DEFAULT_STABILIZE_BOUND})")
    c.add_argument("--out", metavar="path", help="certificate path (default FILE with .cert.json)")

    common(sub.add_parser("verify", help="re-check a certificate from scratch"))
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"cohomology": cmd_cohomology, "check": cmd_check, "present": cmd_present, "verify": cmd_verify}
    try:
        return handlers[args.command](args, out)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ModuleError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
