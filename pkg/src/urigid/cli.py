"""Command-line interface.

Subcommands: certify, flex, stress, gale, gen, refute, verify.  All file I/O
is JSON with 1-based node labels; outputs are written atomically.

Exit codes
----------
0  success (certify: UniversallyRigid; flex/refute: witness found; verify: accepted)
1  error (malformed input, violated invariant)
2  certify: AffineFlexExists / not universally rigid; verify: rejected
3  certify: Inconclusive; flex/refute: nothing found
"""
from __future__ import annotations

import argparse
import json
import sys

from . import _kernels
from .affine import detect_quadric_at_infinity, flex_motion_from_quadric
from .certify import (
    Certificate,
    CertifyOptions,
    VERDICT_AFFINE_FLEX,
    VERDICT_INCONCLUSIVE,
    VERDICT_UNIVERSALLY_RIGID,
    certify,
    refute_by_search,
    verify_certificate,
)
from .errors import UrigidError
from .framework import is_general_position
from .gale import canonical_gale, gale_basis
from .generators import GeneratorSpec, build
from .jsonio import (
    canonical_dumps,
    load_framework,
    omega_to_list,
    parse_stress,
    serialize_framework,
    write_atomic,
)
from .numerics import TolerancePolicy
from .stress import StressSearchOptions, find_max_rank_psd_stress, max_rank_stress_search

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_INCONCLUSIVE = 3

_VERDICT_EXIT = {
    VERDICT_UNIVERSALLY_RIGID: EXIT_OK,
    VERDICT_AFFINE_FLEX: EXIT_NEGATIVE,
    VERDICT_INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


def _tolerance_from_args(args) -> TolerancePolicy:
    return TolerancePolicy(
        rank_rtol=args.rank_rtol,
        psd_atol=args.psd_atol,
        residual_atol=args.residual_atol,
    )


def _emit(args, text: str):
    if getattr(args, "output", None):
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def _parse_dims(spec: str, r: int):
    if spec is None:
        return range(r, r + 3)
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return range(int(lo), int(hi) + 1)
    return [int(spec)]


def _cmd_certify(args) -> int:
    tol = _tolerance_from_args(args)
    fw = load_framework(args.framework)
    user_omega = None
    if args.stress:
        with open(args.stress, "r", encoding="utf-8") as handle:
            user_omega = parse_stress(handle.read(), fw)
    options = CertifyOptions(
        seed=args.seed,
        search=StressSearchOptions(seed=args.seed, restarts=args.restarts),
        user_omega=user_omega,
    )
    cert = certify(fw, tol, options)
    _emit(args, cert.to_json())
    if args.verbose:
        print(f"verdict: {cert.verdict} (route: {cert.route})", file=sys.stderr)
    return _VERDICT_EXIT[cert.verdict]


def _cmd_flex(args) -> int:
    tol = _tolerance_from_args(args)
    fw = load_framework(args.framework)
    phi = detect_quadric_at_infinity(fw, tol)
    if phi is None:
        _emit(args, canonical_dumps({"witness": None}))
        return EXIT_INCONCLUSIVE
    flex = flex_motion_from_quadric(fw, phi, tol)
    doc = {
        "witness": {
            "phi": [[float(x) for x in row] for row in flex.quadric],
            "t": flex.scale,
            "A": [[float(x) for x in row] for row in flex.matrix],
            "flexed_points": [[float(x) for x in p] for p in flex.flexed.points],
        }
    }
    _emit(args, canonical_dumps(doc))
    return EXIT_OK


def _cmd_stress(args) -> int:
    tol = _tolerance_from_args(args)
    fw = load_framework(args.framework)
    result = max_rank_stress_search(fw, tol, StressSearchOptions(seed=args.seed, restarts=args.restarts))
    doc = {
        "basis_dimension": result.basis_dim,
        "basis": [omega_to_list(fw, result.basis[:, k]) for k in range(result.basis_dim)],
        "search": {
            "accepted": result.accepted,
            "objective": result.objective,
            "restart": result.restart,
            "omega": omega_to_list(fw, result.omega) if result.omega is not None else None,
            "spectrum": [float(v) for v in result.report.eigenvalues] if result.report else None,
            "rank": result.report.rank if result.report else None,
            "psd": result.report.psd if result.report else None,
            "backend": _kernels.backend_name(),
        },
    }
    _emit(args, canonical_dumps(doc))
    return EXIT_OK


def _cmd_gale(args) -> int:
    tol = _tolerance_from_args(args)
    fw = load_framework(args.framework)
    z = gale_basis(fw.config, tol)
    doc = {
        "gale": [[float(x) for x in row] for row in z],
        "canonical_gale": None,
        "general_position": is_general_position(fw.config, tol),
    }
    found = find_max_rank_psd_stress(fw, tol, StressSearchOptions(seed=args.seed)) if not fw.graph.is_complete else None
    if found is not None and doc["general_position"]:
        _, s_matrix = found
        doc["canonical_gale"] = [[float(x) for x in row] for row in canonical_gale(fw, s_matrix, tol)]
    _emit(args, canonical_dumps(doc))
    return EXIT_OK


def _cmd_gen(args) -> int:
    spec = GeneratorSpec(kind=args.kind, n=args.n, r=args.r, seed=args.seed, name=args.name)
    fw = build(spec)
    _emit(args, serialize_framework(fw))
    return EXIT_OK


def _cmd_refute(args) -> int:
    tol = _tolerance_from_args(args)
    fw = load_framework(args.framework)
    found = refute_by_search(
        fw,
        dims=_parse_dims(args.dims, fw.r),
        restarts=args.restarts,
        seed=args.seed,
        tol=tol,
        jobs=args.jobs,
    )
    if found is None:
        _emit(args, canonical_dumps({"counterexample": None}))
        return EXIT_INCONCLUSIVE
    doc = {
        "counterexample": {
            "dimension": found.r,
            "points": [[float(x) for x in p] for p in found.points],
        }
    }
    _emit(args, canonical_dumps(doc))
    return EXIT_OK


def _cmd_verify(args) -> int:
    tol = _tolerance_from_args(args)
    fw = load_framework(args.framework)
    with open(args.certificate, "r", encoding="utf-8") as handle:
        cert = Certificate.from_dict(json.loads(handle.read()))
    ok = verify_certificate(fw, cert, tol)
    print("certificate accepted" if ok else "certificate REJECTED")
    return EXIT_OK if ok else EXIT_NEGATIVE


def _add_common(parser):
    parser.add_argument("-o", "--output", help="write the JSON result here (default: stdout)")
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomized steps")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads for multistart phases")
    parser.add_argument("--rank-rtol", type=float, default=1e-9, help="relative singular-value cutoff")
    parser.add_argument("--psd-atol", type=float, default=1e-9, help="eigenvalue floor scale")
    parser.add_argument("--residual-atol", type=float, default=1e-8, help="linear-system residual bound")
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urigid",
        description="Decide and certify universal rigidity of bar frameworks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="emit a certificate for a framework")
    p.add_argument("framework")
    p.add_argument("--stress", help="JSON file with user-supplied edge weights (bypasses the search)")
    p.add_argument("--restarts", type=int, default=8, help="stress-search restarts")
    _add_common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("flex", help="find an affine flex witness, if any")
    p.add_argument("framework")
    _add_common(p)
    p.set_defaults(func=_cmd_flex)

    p = sub.add_parser("stress", help="stress-space basis and max-rank PSD search report")
    p.add_argument("framework")
    p.add_argument("--restarts", type=int, default=8)
    _add_common(p)
    p.set_defaults(func=_cmd_stress)

    p = sub.add_parser("gale", help="null-space basis, and its canonical variant when available")
    p.add_argument("framework")
    _add_common(p)
    p.set_defaults(func=_cmd_gale)

    p = sub.add_parser("gen", help="generate a framework JSON file")
    p.add_argument("kind", choices=GeneratorSpec.KINDS)
    p.add_argument("--n", type=int, default=0, help="node count")
    p.add_argument("--r", type=int, default=0, help="ambient dimension")
    p.add_argument("--name", default="", help="fixture name for kind=named")
    _add_common(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("refute", help="search for an equivalent non-congruent realization")
    p.add_argument("framework")
    p.add_argument("--dims", help="target dimensions, e.g. 2..4 (default r..r+2)")
    p.add_argument("--restarts", type=int, default=50)
    _add_common(p)
    p.set_defaults(func=_cmd_refute)

    p = sub.add_parser("verify", help="independently re-check a certificate")
    p.add_argument("framework")
    p.add_argument("certificate")
    _add_common(p)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UrigidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
