"""Randomized positive-definiteness certification and convexity probes.

A "pass" here is always statistical: positive definiteness quantifies over
all signed measures and cannot be decided by sampling, so passing verdicts
are labelled ``pass_statistical``.  Failures, by contrast, are exact
certificates: every failing verdict carries a witness measure (plus the
pins that produced the offending two-input kernel) whose negative energy
can be recomputed independently.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES
from .geometry import DiscreteMeasure, basis_vector
from .kernels import Kernel, cpd_shift, pin, _pin_unchecked
from .energy import (
    MixturePolynomial,
    PotentialKernel,
    mixture_polynomial,
    mutual_energy,
    potential,
)

__all__ = [
    "Witness",
    "PDVerdict",
    "ConvexityReport",
    "ConstancyReport",
    "InequalityReport",
    "pd_test_2input",
    "npd_test",
    "convexity_probe",
    "potential_constancy_check",
    "inequality_suite",
    "shift_equivalence_battery",
]

_EIG_TOL = DEFAULT_TOLERANCES.eigenvalue


@dataclass(frozen=True)
class Witness:
    """Certificate of failed (conditional) positive definiteness."""

    pins: tuple
    measure: DiscreteMeasure
    energy: float


@dataclass(frozen=True)
class PDVerdict:
    mode: str                      # "pd" or "conditional"
    outcome: str                   # "pass_statistical" or "fail"
    witness: Witness | None
    trials_run: int
    min_eigenvalue_seen: float

    @property
    def passed(self) -> bool:
        return self.outcome == "pass_statistical"


def _balanced_basis(m: int) -> np.ndarray:
    """Orthonormal basis (as columns) of the sum-zero subspace of R^m."""
    basis = np.zeros((m, m - 1))
    for k in range(1, m):
        basis[:k, k - 1] = 1.0
        basis[k, k - 1] = -float(k)
        basis[:, k - 1] /= np.sqrt(k * (k + 1.0))
    return basis


def _kernel_matrix(kernel: Kernel, pts: np.ndarray) -> np.ndarray:
    m = pts.shape[0]
    pairs = np.empty((m, m, 2, pts.shape[1]))
    pairs[..., 0, :] = pts[:, None, :]
    pairs[..., 1, :] = pts[None, :, :]
    mat = kernel.evaluate_batch(pairs)
    return 0.5 * (mat + mat.T)


def _matrix_min_eig(mat: np.ndarray, conditional: bool):
    """Smallest (restricted) eigenvalue and its coefficient vector."""
    if conditional:
        basis = _balanced_basis(mat.shape[0])
        restricted = basis.T @ mat @ basis
        restricted = 0.5 * (restricted + restricted.T)
        vals, vecs = np.linalg.eigh(restricted)
        return float(vals[0]), basis @ vecs[:, 0]
    vals, vecs = np.linalg.eigh(mat)
    return float(vals[0]), vecs[:, 0]


def _build_witness(kernel, pts, coeffs, mat, pins, conditional):
    """Turn an offending eigenvector into a small witness measure.

    Near-zero coefficients are dropped; in conditional mode the remaining
    coefficients are re-centered so the witness stays exactly balanced.
    The reported energy is the quadratic form of the final coefficients.
    """
    keep = np.abs(coeffs) >= 1e-12
    if keep.sum() < 2:
        keep = np.abs(coeffs) > 0
    c = coeffs[keep]
    if conditional:
        c = c - c.sum() / c.size
    sub = mat[np.ix_(keep, keep)]
    energy = float(c @ sub @ c)
    measure = DiscreteMeasure(pts[keep], c)
    return Witness(tuple(np.asarray(p) for p in pins), measure, energy), energy


def pd_test_2input(kernel: Kernel, d: int, *, conditional: bool = False,
                   trials: int = 20, set_size: int = 20, seed: int = 0,
                   tol: float | None = None, include_points=None,
                   pins: tuple = ()) -> PDVerdict:
    """Eigenvalue test of (conditional) positive definiteness for a
    two-input kernel.

    Each trial samples ``set_size`` points, forms the kernel matrix and
    inspects its smallest eigenvalue (restricted to the sum-zero subspace
    in conditional mode).  Any eigenvalue below the scale-relative
    threshold produces a failing verdict with an explicit witness measure.
    ``include_points`` are prepended to every sampled set.
    """
    if kernel.arity != 2:
        raise ValueError("pd_test_2input expects a two-input kernel")
    if trials < 1 or set_size < 2:
        raise ValueError("need trials >= 1 and set_size >= 2")
    fixed = np.zeros((0, d))
    if include_points is not None:
        fixed = np.atleast_2d(np.asarray(include_points, dtype=float))
        if fixed.shape[0] > set_size:
            raise ValueError("more included points than the set size")

    rng = np.random.default_rng(seed)
    mode = "conditional" if conditional else "pd"
    min_eig = np.inf
    witness = None
    for _ in range(trials):
        n_random = set_size - fixed.shape[0]
        pts = rng.standard_normal((n_random, d))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        pts = np.vstack([fixed, pts]) if fixed.size else pts
        mat = _kernel_matrix(kernel, pts)
        tol_eff = tol if tol is not None else _EIG_TOL * max(float(np.max(np.abs(mat))), 1e-12)
        lam, coeffs = _matrix_min_eig(mat, conditional)
        min_eig = min(min_eig, lam)
        if lam < -tol_eff and witness is None:
            cand, energy = _build_witness(kernel, pts, coeffs, mat, pins, conditional)
            if energy < -tol_eff:
                witness = cand
    outcome = "fail" if witness is not None else "pass_statistical"
    return PDVerdict(mode, outcome, witness, trials, float(min_eig))


def _canonical_pins(n: int, d: int) -> np.ndarray:
    if n - 2 > d:
        raise ValueError("not enough dimensions for canonical pins")
    return np.stack([basis_vector(i, d) for i in range(n - 2)])


def _default_probe_points(d: int) -> np.ndarray:
    pts = [basis_vector(0, d), basis_vector(1, d), -basis_vector(0, d)]
    if d >= 3:
        pts.append(basis_vector(2, d))
    return np.stack(pts)


def npd_test(kernel: Kernel, d: int, *, conditional: bool = False,
             pin_trials: int = 5, inner_trials: int = 5, set_size: int = 20,
             seed: int = 0, tol: float | None = None,
             include_points=None) -> PDVerdict:
    """n-input positive definiteness via pinned two-input tests.

    Pins n-2 slots and delegates to :func:`pd_test_2input`.  The canonical
    pin (e_1, ..., e_{n-2}) is always tried first; for rotationally
    invariant kernels it is the only pin that matters in principle, but
    random pins are mixed in regardless in case the invariance flag is
    wrong.  The canonical pin's point sets include a small deterministic
    probe set (basis vectors and -e_1) so that standard counterexamples
    are found reproducibly.
    """
    n = kernel.arity
    if n < 3:
        raise ValueError("npd_test expects arity >= 3; use pd_test_2input")
    if pin_trials < 1:
        raise ValueError("need pin_trials >= 1")
    rng = np.random.default_rng(seed)
    mode = "conditional" if conditional else "pd"
    min_eig = np.inf
    witness = None
    trials_total = 0
    probe = include_points if include_points is not None else _default_probe_points(d)
    for trial in range(pin_trials):
        if trial == 0:
            pin_pts = _canonical_pins(n, d)
            include = probe
        else:
            pin_pts = rng.standard_normal((n - 2, d))
            pin_pts /= np.linalg.norm(pin_pts, axis=1, keepdims=True)
            include = None
        pinned = pin(kernel, pin_pts)
        verdict = pd_test_2input(
            pinned, d, conditional=conditional, trials=inner_trials,
            set_size=set_size, seed=int(rng.integers(2**32)), tol=tol,
            include_points=include, pins=tuple(pin_pts),
        )
        trials_total += verdict.trials_run
        min_eig = min(min_eig, verdict.min_eigenvalue_seen)
        if verdict.witness is not None and witness is None:
            witness = verdict.witness
    outcome = "fail" if witness is not None else "pass_statistical"
    return PDVerdict(mode, outcome, witness, trials_total, float(min_eig))


@dataclass(frozen=True)
class ConvexityReport:
    """Convexity diagnostics of the mixture t -> I_K((1-t) mu + t nu).

    g is the full n-input mixture polynomial; h is the two-input mixture
    through the (n-2)-fold potential of the kernel with respect to mu.
    """

    g_prime_0: float
    g_double_prime_0: float
    h_prime_0: float
    h_double_prime_0: float
    convex_on_unit_interval: bool
    violation_t: float | None
    chord_margin: float
    mixture: MixturePolynomial = field(repr=False)


def convexity_probe(kernel: Kernel, mu: DiscreteMeasure, nu: DiscreteMeasure,
                    grid: int = 1000) -> ConvexityReport:
    """Probe convexity of the energy along the segment from mu to nu."""
    if not (mu.is_probability and nu.is_probability):
        raise ValueError("convexity probes are defined for probability measures")
    n = kernel.arity
    g = mixture_polynomial(kernel, mu, nu)

    if n == 2:
        two_input = kernel
    else:
        two_input = PotentialKernel(kernel, [mu] * (n - 2))
    h0 = mutual_energy(two_input, [mu, mu]).value
    h1 = mutual_energy(two_input, [mu, nu]).value
    h2 = mutual_energy(two_input, [nu, nu]).value

    ts = np.linspace(0.0, 1.0, grid)
    second = g.derivative(ts, order=2)
    convex = bool(np.all(second >= -1e-10))
    chord = (1 - ts) * g(0.0) + ts * g(1.0)
    margins = g(ts) - chord
    worst = int(np.argmax(margins))
    margin = float(margins[worst])
    violation_t = float(ts[worst]) if margin > 1e-10 else None

    return ConvexityReport(
        g_prime_0=g.derivative1_at_zero(),
        g_double_prime_0=g.derivative2_at_zero(),
        h_prime_0=2.0 * (h1 - h0),
        h_double_prime_0=2.0 * (h0 - 2.0 * h1 + h2),
        convex_on_unit_interval=convex,
        violation_t=violation_t,
        chord_margin=margin,
        mixture=g,
    )


@dataclass(frozen=True)
class ConstancyReport:
    values: np.ndarray
    mean: float
    max_deviation: float
    stderr_estimate: float
    tol: float
    passed: bool


def _potential_stderr(kernel: Kernel, mu: DiscreteMeasure, test_points: np.ndarray) -> float:
    """First-order estimate of the sampling noise of the (n-1)-fold
    potential of an M-atom surrogate measure, averaged over test points.

    Projects the degree-2 sum onto single atoms: with row means
    r_j(x) = sum_k w_k K(x, y_j, y_k), the potential's variance is
    approximately 4 * Var_w(r) * sum_j w_j^2.
    """
    if mu.n_atoms < 2 or kernel.arity != 3 or kernel.pair_poly is None:
        return 0.0
    w2 = float(np.sum(mu.weights**2))
    acc = 0.0
    for x in test_points:
        pinned = _pin_unchecked(kernel, x[None, :])
        rows = potential(pinned, [mu], mu.atoms)
        mean = float(mu.weights @ rows)
        zeta = float(mu.weights @ (rows - mean) ** 2)
        acc += 2.0 * np.sqrt(max(zeta, 0.0) * w2)
    return acc / len(test_points)


def potential_constancy_check(kernel: Kernel, mu: DiscreteMeasure, test_points,
                              tol: float | None = None) -> ConstancyReport:
    """Check whether the (n-1)-fold potential of mu is constant.

    Evaluates U at each test point and compares the worst deviation from
    the mean against ``tol``; when no tolerance is given, it defaults to
    five estimated standard errors of the sampled potential (plus a small
    floor so exactly-constant potentials pass).
    """
    if mu.n_atoms < 1:
        raise ValueError("measure needs at least one atom")
    pts = np.atleast_2d(np.asarray(getattr(test_points, "points", test_points), dtype=float))
    n = kernel.arity
    values = potential(kernel, [mu] * (n - 1), pts)
    mean = float(np.mean(values))
    max_dev = float(np.max(np.abs(values - mean)))
    stderr = _potential_stderr(kernel, mu, pts)
    if tol is None:
        tol = max(5.0 * stderr, 1e-10 * max(1.0, abs(mean)))
    return ConstancyReport(values, mean, max_dev, stderr, float(tol), max_dev <= tol)


@dataclass(frozen=True)
class InequalityReport:
    trials: int
    am_worst: float
    gm_worst: float | None
    lower_worst: float
    diagonal_worst: float
    am_violations: int
    gm_violations: int
    lower_violations: int
    diagonal_violations: int
    gm_trials: int

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "am_worst": self.am_worst,
            "gm_worst": self.gm_worst,
            "lower_worst": self.lower_worst,
            "diagonal_worst": self.diagonal_worst,
            "am_violations": self.am_violations,
            "gm_violations": self.gm_violations,
            "lower_violations": self.lower_violations,
            "diagonal_violations": self.diagonal_violations,
            "gm_trials": self.gm_trials,
        }


def _random_probability_measure(rng, d: int, max_atoms: int = 5) -> DiscreteMeasure:
    k = int(rng.integers(2, max_atoms + 1))
    atoms = rng.standard_normal((k, d))
    atoms /= np.linalg.norm(atoms, axis=1, keepdims=True)
    w = rng.random(k) + 1e-3
    return DiscreteMeasure(atoms, w / w.sum())


def inequality_suite(kernel: Kernel, d: int, trials: int = 200, seed: int = 0,
                     violation_tol: float = 1e-10) -> InequalityReport:
    """Residuals of the mean bounds on mixed energies.

    For random tuples of small atomic probability measures this records
    the worst residual of: the arithmetic-mean upper bound, the
    geometric-mean upper bound (only on trials where every marginal
    energy is nonnegative, where it is defined), the mean lower bound,
    and the diagonal maximum bound on raw kernel values.
    """
    if trials < 1:
        raise ValueError("need trials >= 1")
    n = kernel.arity
    rng = np.random.default_rng(seed)
    am_worst = -np.inf
    gm_worst = None
    lower_worst = -np.inf
    diag_worst = -np.inf
    am_bad = gm_bad = lower_bad = diag_bad = 0
    gm_trials = 0
    for _ in range(trials):
        measures = [_random_probability_measure(rng, d) for _ in range(n)]
        singles = [mutual_energy(kernel, [m] * n).value for m in measures]
        mixed = mutual_energy(kernel, measures).value
        am_res = mixed - float(np.mean(singles))
        am_worst = max(am_worst, am_res)
        am_bad += am_res > violation_tol
        lower_res = -float(np.mean(singles)) - mixed
        lower_worst = max(lower_worst, lower_res)
        lower_bad += lower_res > violation_tol
        if all(s >= 0.0 for s in singles):
            gm_trials += 1
            gm_res = mixed - float(np.prod([s ** (1.0 / n) for s in singles]))
            gm_worst = gm_res if gm_worst is None else max(gm_worst, gm_res)
            gm_bad += gm_res > violation_tol

        zs = rng.standard_normal((n, d))
        zs /= np.linalg.norm(zs, axis=1, keepdims=True)
        probes = np.vstack([zs, basis_vector(0, d)[None, :]])
        diag_vals = [kernel.evaluate(np.repeat(z[None, :], n, axis=0)) for z in probes]
        diag_res = kernel.evaluate(zs) - max(diag_vals)
        diag_worst = max(diag_worst, diag_res)
        diag_bad += diag_res > violation_tol
    return InequalityReport(
        trials=trials,
        am_worst=float(am_worst),
        gm_worst=None if gm_worst is None else float(gm_worst),
        lower_worst=float(lower_worst),
        diagonal_worst=float(diag_worst),
        am_violations=int(am_bad),
        gm_violations=int(gm_bad),
        lower_violations=int(lower_bad),
        diagonal_violations=int(diag_bad),
        gm_trials=gm_trials,
    )


def shift_equivalence_battery(kernel: Kernel, d: int, *, trials: int = 10,
                              set_size: int = 12, seed: int = 0,
                              x0=None) -> dict:
    """Compare conditional PD of a two-input kernel against plain PD of
    its anchor-shifted version on shared point sets containing the anchor.

    Returns per-trial minimum eigenvalues of both matrices plus agreement
    counts (sign agreement up to a scale-relative tolerance band).
    """
    if kernel.arity != 2:
        raise ValueError("the shift battery applies to two-input kernels")
    x0 = basis_vector(0, d) if x0 is None else np.asarray(x0, dtype=float)
    shifted = cpd_shift(kernel, x0)
    rng = np.random.default_rng(seed)
    agree = disagree = borderline = 0
    pairs = []
    for _ in range(trials):
        pts = rng.standard_normal((set_size - 1, d))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        pts = np.vstack([x0[None, :], pts])
        mat_g = _kernel_matrix(kernel, pts)
        mat_p = _kernel_matrix(shifted, pts)
        lam_c, _ = _matrix_min_eig(mat_g, conditional=True)
        lam_p, _ = _matrix_min_eig(mat_p, conditional=False)
        tol_c = _EIG_TOL * max(float(np.max(np.abs(mat_g))), 1e-12)
        tol_p = _EIG_TOL * max(float(np.max(np.abs(mat_p))), 1e-12)
        neg_c = lam_c < -tol_c
        neg_p = lam_p < -tol_p
        near_zero = abs(lam_c) <= 5 * tol_c or abs(lam_p) <= 5 * tol_p
        if neg_c == neg_p:
            agree += 1
        elif near_zero:
            borderline += 1
        else:
            disagree += 1
        pairs.append((lam_c, lam_p))
    return {
        "trials": trials,
        "agreements": agree,
        "borderline": borderline,
        "disagreements": disagree,
        "eigenvalue_pairs": pairs,
    }
