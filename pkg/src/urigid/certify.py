"""Universal-rigidity certification, certificate verification, and empirical refutation.

The pipeline combines two sufficient conditions for universal rigidity:

* a PSD stress matrix of rank n-r-1 on a configuration in general position
  certifies on its own; the certificate additionally records that the reduced
  missing-edge system has only the zero solution, which is the mechanism
  behind the implication;
* without general position, the same stress certifies when no quadric at
  infinity exists (no affinely-equivalent, non-congruent realization).

A validated quadric witness always refutes universal rigidity: the explicit
flexed configuration is equivalent and non-congruent, and it is embedded in
the certificate as a counterexample.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .affine import (
    detect_quadric_at_infinity,
    flex_motion_from_quadric,
    missing_edge_system_canonical,
    quadric_residual,
)
from .errors import FrameworkError, SchemaError, UrigidError
from .framework import (
    Configuration,
    Framework,
    check_spanning,
    congruent,
    distance_matrix,
    equivalent,
    is_general_position,
    min_degree_check,
)
from .gale import canonical_gale
from .jsonio import canonical_dumps, framework_digest, omega_from_list, omega_to_list
from .numerics import DEFAULT_TOL, TolerancePolicy, numeric_rank
from .stress import (
    StressSearchOptions,
    assemble_stress,
    max_rank_stress_search,
    validate_stress,
)

VERDICT_UNIVERSALLY_RIGID = "UniversallyRigid"
VERDICT_AFFINE_FLEX = "AffineFlexExists"
VERDICT_INCONCLUSIVE = "Inconclusive"

ROUTE_COMPLETE = "complete-graph"
ROUTE_GENERAL_POSITION = "psd-stress-general-position"
ROUTE_NO_QUADRIC = "psd-stress-no-quadric"
ROUTE_QUADRIC_WITNESS = "quadric-witness"

_EXPECTED_CERT_FIELDS = (
    "verdict",
    "route",
    "not_universally_rigid",
    "hypotheses",
    "witnesses",
    "tolerances",
    "framework_digest",
    "seed",
    "search",
    "notes",
)


@dataclass
class Certificate:
    """Verdict plus every numeric witness needed for independent re-verification."""

    verdict: str
    route: str | None
    not_universally_rigid: bool
    hypotheses: dict
    witnesses: dict
    tolerances: dict
    framework_digest: str
    seed: int
    search: dict
    notes: list

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "route": self.route,
            "not_universally_rigid": self.not_universally_rigid,
            "hypotheses": dict(self.hypotheses),
            "witnesses": dict(self.witnesses),
            "tolerances": dict(self.tolerances),
            "framework_digest": self.framework_digest,
            "seed": self.seed,
            "search": dict(self.search),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return canonical_dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc) -> "Certificate":
        if not isinstance(doc, dict):
            raise SchemaError(f"certificate must be an object, got {type(doc).__name__}")
        missing = [f for f in _EXPECTED_CERT_FIELDS if f not in doc]
        if missing:
            raise SchemaError(f"missing required field: {missing[0]}")
        if doc["verdict"] not in (
            VERDICT_UNIVERSALLY_RIGID,
            VERDICT_AFFINE_FLEX,
            VERDICT_INCONCLUSIVE,
        ):
            raise SchemaError(f"verdict: unknown value {doc['verdict']!r}")
        for name, kind in (("hypotheses", dict), ("witnesses", dict), ("tolerances", dict), ("search", dict), ("notes", list)):
            if not isinstance(doc[name], kind):
                raise SchemaError(f"{name}: expected {kind.__name__}")
        return cls(
            verdict=doc["verdict"],
            route=doc["route"],
            not_universally_rigid=bool(doc["not_universally_rigid"]),
            hypotheses=dict(doc["hypotheses"]),
            witnesses=dict(doc["witnesses"]),
            tolerances=dict(doc["tolerances"]),
            framework_digest=str(doc["framework_digest"]),
            seed=int(doc["seed"]),
            search=dict(doc["search"]),
            notes=list(doc["notes"]),
        )


@dataclass(frozen=True)
class CertifyOptions:
    """Knobs for one certification run; the defaults are the deterministic contract."""

    seed: int = 0
    search: StressSearchOptions | None = None
    user_omega: np.ndarray | None = None
    gp_cap: int = 100_000

    def search_options(self) -> StressSearchOptions:
        if self.search is not None:
            return self.search
        return StressSearchOptions(seed=self.seed)


def _empty_hypotheses(fw: Framework) -> dict:
    return {
        "connected": True,
        "complete": fw.graph.is_complete,
        "dimension_ok": None,
        "spanning": None,
        "general_position": None,
        "min_degree_ok": None,
        "stress_found": None,
        "stress_rank": None,
        "max_rank_target": fw.n - fw.r - 1,
        "stress_psd": None,
        "stress_lambda_min": None,
        "quadric_kernel_trivial": None,
        "canonical_system_full_rank": None,
    }


def _tolerances_dict(tol: TolerancePolicy) -> dict:
    return {
        "rank_rtol": tol.rank_rtol,
        "psd_atol": tol.psd_atol,
        "residual_atol": tol.residual_atol,
    }


def _empty_witnesses() -> dict:
    return {
        "omega": None,
        "spectrum": None,
        "canonical_gale": None,
        "flex": None,
        "counterexample_points": None,
        "counterexample_dimension": None,
    }


def certify(
    fw: Framework,
    tol: TolerancePolicy = DEFAULT_TOL,
    options: CertifyOptions | None = None,
) -> Certificate:
    """Decide universal rigidity and emit a self-contained certificate.

    Pipeline: complete graphs short-circuit; the configuration must span;
    then a maximum-rank PSD stress is obtained (user-supplied weights bypass
    the search) and combined with either general position or a trivial
    edge-quadric kernel.  A surviving quadric witness yields an explicit
    counterexample configuration instead.
    """
    opts = options or CertifyOptions()
    hyp = _empty_hypotheses(fw)
    wit = _empty_witnesses()
    notes: list = []
    search_opts = opts.search_options()
    search_meta = {
        "restarts": search_opts.restarts,
        "iterations": search_opts.iterations,
        "step_scale": search_opts.step_scale,
        "accept_factor": search_opts.accept_factor,
        "user_stress": opts.user_omega is not None,
    }

    def build(verdict, route, not_ur=False):
        return Certificate(
            verdict=verdict,
            route=route,
            not_universally_rigid=not_ur,
            hypotheses=hyp,
            witnesses=wit,
            tolerances=_tolerances_dict(tol),
            framework_digest=framework_digest(fw),
            seed=search_opts.seed,
            search=search_meta,
            notes=notes,
        )

    if not check_spanning(fw.config, tol):
        raise FrameworkError("configuration does not affinely span its ambient space")
    hyp["spanning"] = True

    complete = fw.graph.is_complete
    if complete:
        notes.append(
            "complete graph: every pairwise distance is an edge, so any equivalent"
            " realization is congruent and the verdict is immediate"
        )

    hyp["dimension_ok"] = fw.r <= fw.n - 2
    if not hyp["dimension_ok"]:
        if complete:
            return build(VERDICT_UNIVERSALLY_RIGID, ROUTE_COMPLETE)
        notes.append(
            f"certification needs r <= n-2 (got n={fw.n}, r={fw.r}); no null-space"
            " basis exists for the stress analysis"
        )
        return build(VERDICT_INCONCLUSIVE, None)

    hyp["general_position"] = is_general_position(fw.config, tol, cap=opts.gp_cap)
    hyp["min_degree_ok"] = min_degree_check(fw)

    s_matrix = None
    omega = None
    if opts.user_omega is not None:
        omega = np.asarray(opts.user_omega, dtype=float)
        s_matrix = assemble_stress(fw, omega, tol)  # raises if not an equilibrium stress
        report = validate_stress(fw, s_matrix, tol)
        if not report.certifies:
            notes.append("supplied stress failed PSD/max-rank validation; search bypassed")
            s_matrix = None
            omega = None
    else:
        result = max_rank_stress_search(fw, tol, search_opts)
        if result.accepted:
            omega, s_matrix, report = result.omega, result.matrix, result.report

    hyp["stress_found"] = s_matrix is not None
    if s_matrix is not None:
        hyp["stress_rank"] = report.rank
        hyp["stress_psd"] = report.psd
        hyp["stress_lambda_min"] = report.lambda_min
        wit["omega"] = omega_to_list(fw, omega)
        wit["spectrum"] = [float(v) for v in report.eigenvalues]

    if s_matrix is not None and hyp["general_position"]:
        zhat = canonical_gale(fw, s_matrix, tol)
        mbar = len(fw.graph.missing_edges)
        if mbar == 0:
            # No unknowns: the reduced system is vacuously full rank.
            hyp["canonical_system_full_rank"] = True
        else:
            system = missing_edge_system_canonical(fw, zhat, tol)
            hyp["canonical_system_full_rank"] = numeric_rank(system, tol) == mbar
        wit["canonical_gale"] = [[float(x) for x in row] for row in zhat]
        if not hyp["canonical_system_full_rank"]:
            notes.append(
                "reduced missing-edge system unexpectedly rank deficient despite the"
                " general-position and max-rank hypotheses"
            )
        return build(VERDICT_UNIVERSALLY_RIGID, ROUTE_GENERAL_POSITION)

    if complete:
        # Trivially rigid even when the stress analysis does not certify.
        return build(VERDICT_UNIVERSALLY_RIGID, ROUTE_COMPLETE)

    phi = detect_quadric_at_infinity(fw, tol)
    hyp["quadric_kernel_trivial"] = phi is None

    if s_matrix is not None and phi is None:
        notes.append("general position fails but no quadric at infinity exists")
        return build(VERDICT_UNIVERSALLY_RIGID, ROUTE_NO_QUADRIC)

    if phi is not None:
        flex = flex_motion_from_quadric(fw, phi, tol)
        gap = _congruence_gap(fw.config, flex.flexed)
        wit["flex"] = {
            "phi": [[float(x) for x in row] for row in flex.quadric],
            "t": flex.scale,
            "A": [[float(x) for x in row] for row in flex.matrix],
            "flexed_points": [[float(x) for x in p] for p in flex.flexed.points],
        }
        wit["counterexample_points"] = wit["flex"]["flexed_points"]
        wit["counterexample_dimension"] = fw.r
        notes.append(
            "flexed configuration preserves all edge lengths and changes a pairwise"
            f" distance (relative gap {gap:.3e}); universal rigidity refuted"
        )
        return build(VERDICT_AFFINE_FLEX, ROUTE_QUADRIC_WITNESS, not_ur=True)

    notes.append(
        "no maximum-rank PSD stress was found and the edge-quadric kernel is trivial;"
        " the implemented criteria cannot decide this framework"
    )
    return build(VERDICT_INCONCLUSIVE, None)


def _congruence_gap(conf_a: Configuration, conf_b: Configuration) -> float:
    da = distance_matrix(conf_a)
    db = distance_matrix(conf_b)
    scale = float(da.max())
    if scale == 0.0:
        return float(db.max())
    return float(np.abs(da - db).max() / scale)


def _close(a: float, b: float, tol: TolerancePolicy, scale: float = 1.0) -> bool:
    return abs(a - b) <= tol.residual_atol * max(1.0, abs(scale))


def verify_certificate(fw: Framework, cert: Certificate, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Recompute every certified hypothesis from raw data; True iff all hold.

    Nothing cached in the certificate is trusted: the stress is reassembled
    from its edge weights, the spectrum/rank/PSD flags are recomputed, general
    position is re-tested, and flex witnesses are re-validated against the
    framework.  Returns False on any mismatch, including a wrong digest.
    """
    if not isinstance(cert, Certificate):
        raise SchemaError("expected a Certificate")
    if cert.framework_digest != framework_digest(fw):
        return False
    hyp = cert.hypotheses
    if not check_spanning(fw.config, tol):
        return False
    complete = fw.graph.is_complete
    if hyp.get("complete") != complete:
        return False

    def recheck_bool(name, actual) -> bool:
        recorded = hyp.get(name)
        return recorded is None or bool(recorded) == bool(actual)

    if not recheck_bool("min_degree_ok", min_degree_check(fw)):
        return False
    gp = None
    if hyp.get("general_position") is not None:
        gp = is_general_position(fw.config, tol)
        if bool(hyp["general_position"]) != gp:
            return False

    def recheck_stress():
        """Reassemble the stress from the recorded weights and revalidate everything."""
        entries = cert.witnesses.get("omega")
        if not entries:
            return None
        try:
            omega = omega_from_list(fw, entries)
            s_matrix = assemble_stress(fw, omega, tol)
        except UrigidError:
            return None
        report = validate_stress(fw, s_matrix, tol)
        if not report.certifies:
            return None
        spectrum = cert.witnesses.get("spectrum")
        if spectrum is not None:
            recomputed = report.eigenvalues
            if len(spectrum) != len(recomputed):
                return None
            scale = max(1.0, float(np.abs(recomputed).max()))
            if any(not _close(float(a), float(b), tol, scale) for a, b in zip(spectrum, recomputed)):
                return None
        if hyp.get("stress_rank") is not None and int(hyp["stress_rank"]) != report.rank:
            return None
        return s_matrix

    if cert.verdict == VERDICT_UNIVERSALLY_RIGID:
        if cert.not_universally_rigid:
            return False
        if cert.route == ROUTE_COMPLETE:
            return complete
        if cert.route == ROUTE_GENERAL_POSITION:
            s_matrix = recheck_stress()
            if s_matrix is None:
                return False
            if gp is None:
                gp = is_general_position(fw.config, tol)
            if not gp:
                return False
            mbar = len(fw.graph.missing_edges)
            try:
                zhat = canonical_gale(fw, s_matrix, tol)
                if mbar == 0:
                    return True
                system = missing_edge_system_canonical(fw, zhat, tol)
            except UrigidError:
                return False
            return numeric_rank(system, tol) == mbar
        if cert.route == ROUTE_NO_QUADRIC:
            if complete:
                return False
            s_matrix = recheck_stress()
            if s_matrix is None:
                return False
            return detect_quadric_at_infinity(fw, tol) is None
        return False

    if cert.verdict == VERDICT_AFFINE_FLEX:
        flex = cert.witnesses.get("flex")
        if not isinstance(flex, dict):
            return False
        try:
            phi = np.asarray(flex["phi"], dtype=float)
            flexed = Configuration(np.asarray(flex["flexed_points"], dtype=float))
        except (KeyError, TypeError, FrameworkError):
            return False
        if phi.shape != (fw.r, fw.r) or not np.linalg.norm(phi) > 0:
            return False
        max_len2 = max(
            float(np.max(np.einsum("ek,ek->e", fw.edge_vectors(), fw.edge_vectors()))), 1.0
        )
        if quadric_residual(fw, phi) > tol.residual_atol * np.linalg.norm(phi) * max_len2:
            return False
        try:
            flexed_fw = Framework(fw.graph, flexed)
        except FrameworkError:
            return False
        if not equivalent(fw, flexed_fw, tol):
            return False
        return not congruent(fw.config, flexed, tol)

    if cert.verdict == VERDICT_INCONCLUSIVE:
        # No witnesses to re-check; re-run the deterministic search with the
        # recorded parameters and confirm it still finds nothing.
        if complete:
            return False
        if hyp.get("dimension_ok") is False:
            return fw.r > fw.n - 2
        if hyp.get("stress_found"):
            return False
        if hyp.get("quadric_kernel_trivial") is not None:
            if bool(hyp["quadric_kernel_trivial"]) != (detect_quadric_at_infinity(fw, tol) is None):
                return False
        search = cert.search or {}
        if search.get("user_stress"):
            # The search was bypassed; the absence claim cannot be re-derived
            # without the original user input, so only the hypotheses above count.
            return True
        opts = StressSearchOptions(
            restarts=int(search.get("restarts", 8)),
            iterations=int(search.get("iterations", 10_000)),
            step_scale=float(search.get("step_scale", 1.0)),
            seed=int(cert.seed),
            accept_factor=float(search.get("accept_factor", 10.0)),
        )
        return not max_rank_stress_search(fw, tol, opts).accepted

    return False


def refute_by_search(
    fw: Framework,
    dims=None,
    restarts: int = 50,
    seed: int = 0,
    tol: TolerancePolicy = DEFAULT_TOL,
    f_tol: float = 1e-16,
    gap_rtol: float = 1e-6,
    perturbation_scale: float = 0.1,
    max_iters: int = 1000,
    jobs: int = 1,
):
    """Hunt for an equivalent, non-congruent realization by multistart descent.

    For each target dimension the original points are padded, perturbed by
    ``perturbation_scale`` times the configuration diameter, and driven back
    onto the edge-length constraints.  A returned configuration empirically
    refutes universal rigidity (objective below ``f_tol``, relative distance
    gap at least ``gap_rtol``); None proves nothing.
    """
    r = fw.r
    if dims is None:
        dims = range(r, r + 3)
    dims = [int(s) for s in dims]
    if any(s < 1 for s in dims):
        raise UrigidError(f"target dimensions must be positive, got {dims}")
    pts = fw.config.points
    n = fw.n
    d_orig = distance_matrix(fw.config)
    diameter = float(d_orig.max())
    edges = np.asarray(fw.graph.edges, dtype=np.int64).reshape(-1, 2)
    lengths2 = np.einsum("ek,ek->e", fw.edge_vectors(), fw.edge_vectors())

    def attempt(s: int, trial: int):
        rng = np.random.default_rng([seed, s, trial])
        q0 = np.zeros((n, s))
        q0[:, : min(r, s)] = pts[:, : min(r, s)]
        q0 += perturbation_scale * diameter * rng.standard_normal((n, s))
        q, f, _ = _kernels.edge_descent(q0, edges, lengths2, max_iters, f_tol)
        if f > f_tol:
            return None
        candidate = Configuration(q)
        dq = distance_matrix(candidate)
        gap = float(np.abs(d_orig - dq).max() / diameter) if diameter > 0 else float(dq.max())
        if gap < gap_rtol:
            return None
        return candidate

    tasks = [(s, t) for s in dims for t in range(restarts)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda st: attempt(*st), tasks))
        for outcome in outcomes:
            if outcome is not None:
                return outcome
        return None
    for s, t in tasks:
        outcome = attempt(s, t)
        if outcome is not None:
            return outcome
    return None
