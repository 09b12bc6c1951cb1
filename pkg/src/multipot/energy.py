"""Discrete energies, mutual energies, potentials and mixture polynomials.

Exact energies of atomic measures are weighted sums of kernel values over
all atom tuples.  Two evaluation routes exist:

* a dense route that enumerates tuples (chunked to bound memory), and
* a moment-contraction route for pair-polynomial kernels of arity <= 3,
  which factors each monomial through per-measure moment matrices and
  turns an O(N1*N2*N3) sum into O(N * d^p) work.

Both routes compute the same finite sum (up to floating-point reordering);
the dense route is used for small inputs, the contraction route for large
atomic measures such as sampled stand-ins for the uniform measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DiscreteMeasure, PointConfiguration
from .kernels import Kernel, _pin_unchecked

__all__ = [
    "EnergyEstimate",
    "MixturePolynomial",
    "PotentialKernel",
    "discrete_energy",
    "mutual_energy",
    "potential",
    "mc_energy_uniform",
    "mixture_polynomial",
]

_MAX_EXACT_ARITY = 4
_DENSE_LIMIT = 20_000_000      # hard cap on enumerated tuples
_FAST_SWITCH = 65_536          # beyond this many tuples, prefer contraction
_MAX_FEATURE_DIM = 4096        # d**power cap for the contraction route


@dataclass(frozen=True)
class EnergyEstimate:
    """An energy value with its Monte-Carlo standard error.

    stderr == 0 means the computation was an exact finite sum.
    """

    value: float
    stderr: float
    samples_used: int

    @property
    def is_exact(self) -> bool:
        return self.stderr == 0.0

    def as_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "samples_used": self.samples_used}


# --- dense tuple enumeration ---------------------------------------------------


def _tuple_grid_values(kernel: Kernel, arrays: list[np.ndarray]) -> np.ndarray:
    """Kernel values on the full product grid of the given point arrays."""
    sizes = [a.shape[0] for a in arrays]
    n, d = len(arrays), arrays[0].shape[1]
    rest = int(np.prod(sizes[1:])) if n > 1 else 1
    chunk = max(1, 4_000_000 // max(rest, 1))
    vals = np.empty(sizes)
    for start in range(0, sizes[0], chunk):
        stop = min(sizes[0], start + chunk)
        block = (stop - start,) + tuple(sizes[1:])
        pts = np.empty(block + (n, d))
        for s, arr in enumerate(arrays):
            seg = arr[start:stop] if s == 0 else arr
            shape = [1] * n
            shape[s] = seg.shape[0]
            pts[..., s, :] = seg.reshape(tuple(shape) + (d,))
        vals[start:stop] = kernel.evaluate_batch(pts)
    return vals


def _dense_mutual(kernel: Kernel, measures: list[DiscreteMeasure]) -> float:
    vals = _tuple_grid_values(kernel, [m.atoms for m in measures])
    letters = "abcd"[: len(measures)]
    spec = letters + "," + ",".join(letters) + "->"
    return float(np.einsum(spec, vals, *[m.weights for m in measures]))


# --- moment-contraction route ---------------------------------------------------


def _features(pts: np.ndarray, power: int) -> np.ndarray:
    """Tensor-power feature map: (N, d) -> (N, d**power), power 0 -> ones."""
    n = pts.shape[0]
    if power == 0:
        return np.ones((n, 1))
    feat = pts
    for _ in range(power - 1):
        feat = np.einsum("na,nb->nab", feat, pts).reshape(n, -1)
    return feat


def _mono_exponent(mono, pair) -> int:
    for p, e in mono:
        if p == pair:
            return e
    return 0


def _poly_partial(poly, measures: list[DiscreteMeasure], queries: np.ndarray | None):
    """Contract the first len(measures) slots of a pair polynomial against
    atomic measures; remaining slots are filled by query tuples.

    queries has shape (Q, r, d) with r = poly.nslots - len(measures);
    returns a scalar when r == 0, else an array of Q values.
    """
    j = len(measures)
    r = poly.nslots - j
    if queries is None:
        queries = np.zeros((1, 0, 0))
    if queries.shape[1] != r:
        raise ValueError(f"queries must supply {r} points per tuple")
    nq = queries.shape[0]
    ns = poly.nslots
    anchors = poly.anchors
    total = 0.0 if r == 0 else np.zeros(nq)

    for mono, coeff in poly.terms.items():
        # weights absorbing anchor factors of integrated slots
        wt = []
        for s in range(j):
            w = measures[s].weights
            for (a, b), e in mono:
                if a == s and b >= ns:
                    w = w * (measures[s].atoms @ anchors[b - ns]) ** e
                elif b == s and a >= ns:
                    w = w * (measures[s].atoms @ anchors[a - ns]) ** e
            wt.append(w)
        # per-query factor from anchor pairs and query-query pairs
        if r == 0:
            qf = 1.0
        else:
            qf = np.full(nq, 1.0)
            for (a, b), e in mono:
                if j <= a < ns and b >= ns:
                    qf = qf * (queries[:, a - j, :] @ anchors[b - ns]) ** e
                elif j <= a < ns and j <= b < ns:
                    qf = qf * np.einsum("qd,qd->q", queries[:, a - j, :], queries[:, b - j, :]) ** e

        if j == 1 and r == 0:
            total += coeff * float(np.sum(wt[0]))
        elif j == 2 and r == 0:
            a = _mono_exponent(mono, (0, 1))
            s1 = wt[0] @ _features(measures[0].atoms, a)
            s2 = wt[1] @ _features(measures[1].atoms, a)
            total += coeff * float(s1 @ s2)
        elif j == 3 and r == 0:
            ea = _mono_exponent(mono, (0, 1))
            eb = _mono_exponent(mono, (1, 2))
            ec = _mono_exponent(mono, (0, 2))
            m1 = np.einsum("i,ix,iy->xy", wt[0], _features(measures[0].atoms, ec),
                           _features(measures[0].atoms, ea))
            m2 = np.einsum("i,ix,iy->xy", wt[1], _features(measures[1].atoms, ea),
                           _features(measures[1].atoms, eb))
            m3 = np.einsum("i,ix,iy->xy", wt[2], _features(measures[2].atoms, eb),
                           _features(measures[2].atoms, ec))
            total += coeff * float(np.trace(m1 @ m2 @ m3))
        elif j == 1 and r == 1:
            a = _mono_exponent(mono, (0, 1))
            s = wt[0] @ _features(measures[0].atoms, a)
            total = total + coeff * qf * (_features(queries[:, 0, :], a) @ s)
        elif j == 2 and r == 1:
            ea = _mono_exponent(mono, (0, 1))
            eb = _mono_exponent(mono, (1, 2))
            ec = _mono_exponent(mono, (0, 2))
            b_mat = np.einsum("i,ix,iy->xy", wt[1], _features(measures[1].atoms, ea),
                              _features(measures[1].atoms, eb))
            m = np.einsum("i,ix,iy->xy", wt[0], _features(measures[0].atoms, ec),
                          _features(measures[0].atoms, ea) @ b_mat)
            vals = np.einsum("qx,xy,qy->q", _features(queries[:, 0, :], ec), m,
                             _features(queries[:, 0, :], eb))
            total = total + coeff * qf * vals
        elif j == 1 and r == 2:
            ea = _mono_exponent(mono, (0, 1))
            ec = _mono_exponent(mono, (0, 2))
            s = np.einsum("i,ix,iy->xy", wt[0], _features(measures[0].atoms, ea),
                          _features(measures[0].atoms, ec))
            vals = np.einsum("qx,xy,qy->q", _features(queries[:, 0, :], ea), s,
                             _features(queries[:, 1, :], ec))
            total = total + coeff * qf * vals
        else:
            raise NotImplementedError(f"contraction not available for j={j}, r={r}")
    return total


def _contraction_available(kernel: Kernel, d: int) -> bool:
    poly = kernel.pair_poly
    if poly is None or poly.nslots > 3:
        return False
    return d ** max(poly.max_power(), 1) <= _MAX_FEATURE_DIM


# --- public operations -----------------------------------------------------------


def _validate_measures(kernel: Kernel, measures) -> list[DiscreteMeasure]:
    measures = list(measures)
    if len(measures) != kernel.arity:
        raise ValueError(
            f"kernel '{kernel.name}' has arity {kernel.arity}, got {len(measures)} measures"
        )
    dims = {m.dimension for m in measures}
    if len(dims) != 1:
        raise ValueError("measures must share a dimension")
    return measures


def mutual_energy(kernel: Kernel, measures, *, force_dense: bool = False) -> EnergyEstimate:
    """Exact mutual energy of a tuple of atomic measures.

    Computes the full weighted sum of kernel values over all atom tuples,
    one measure per kernel slot.  Exact, so stderr is 0.
    """
    measures = _validate_measures(kernel, measures)
    if kernel.arity > _MAX_EXACT_ARITY:
        raise ValueError(f"exact sums support arity <= {_MAX_EXACT_ARITY}")
    n_tuples = math.prod(m.n_atoms for m in measures)
    d = measures[0].dimension
    if isinstance(kernel, PotentialKernel):
        # large potential-kernel energies unfold into the base kernel's
        # mutual energy (same finite sum); small ones keep the genuine
        # pointwise route so the two paths stay independently testable
        inner = math.prod(m.n_atoms for m in kernel.measures)
        if inner * n_tuples > _FAST_SWITCH:
            return mutual_energy(kernel.base, kernel.measures + measures,
                                 force_dense=force_dense)
    use_fast = (not force_dense) and _contraction_available(kernel, d) and n_tuples > _FAST_SWITCH
    if use_fast:
        value = float(_poly_partial(kernel.pair_poly, measures, None))
    else:
        if n_tuples > _DENSE_LIMIT:
            raise ValueError(
                f"{n_tuples} atom tuples exceed the dense limit and no "
                "contraction route applies to this kernel"
            )
        value = _dense_mutual(kernel, measures)
    return EnergyEstimate(value, 0.0, n_tuples)


def discrete_energy(kernel: Kernel, config: PointConfiguration) -> EnergyEstimate:
    """Discrete energy of an N-point multiset: the average of the kernel
    over all N^n ordered tuples, repeats included."""
    if kernel.arity > _MAX_EXACT_ARITY:
        raise ValueError(f"exact sums support arity <= {_MAX_EXACT_ARITY}")
    n = config.n_points
    n_tuples = n ** kernel.arity
    if n_tuples <= _DENSE_LIMIT:
        vals = _tuple_grid_values(kernel, [config.points] * kernel.arity)
        value = float(vals.sum()) / n_tuples
    else:
        empirical = DiscreteMeasure.from_configuration(config)
        if not _contraction_available(kernel, config.dimension):
            raise ValueError(f"{n_tuples} tuples exceed the dense limit for this kernel")
        value = float(_poly_partial(kernel.pair_poly, [empirical] * kernel.arity, None))
    return EnergyEstimate(value, 0.0, n_tuples)


def _coerce_queries(r: int, at) -> np.ndarray:
    if isinstance(at, PointConfiguration):
        at = at.points
    q = np.asarray(at, dtype=float)
    if q.ndim == 1:
        q = q[None, :]
    if q.ndim == 2:
        if r != 1:
            raise ValueError(
                f"this potential leaves {r} free slots; pass query tuples of shape (Q, {r}, d)"
            )
        q = q[:, None, :]
    if q.ndim != 3 or q.shape[1] != r:
        raise ValueError(f"queries must have shape (Q, {r}, d)")
    return q


def potential(kernel: Kernel, measures, at) -> np.ndarray:
    """The j-fold potential: integrate the first j slots against the given
    measures and evaluate at each query tuple.

    For j = arity-1 each query is a single point and one value per point is
    returned; for smaller j pass query tuples of shape (Q, arity-j, d).
    """
    measures = list(measures)
    j = len(measures)
    n = kernel.arity
    if not 1 <= j <= n - 1:
        raise ValueError(f"number of integrated slots must be in [1, {n - 1}], got {j}")
    dims = {m.dimension for m in measures}
    if len(dims) != 1:
        raise ValueError("measures must share a dimension")
    d = dims.pop()
    queries = _coerce_queries(n - j, at)
    if queries.shape[2] != d:
        raise ValueError("query dimension does not match the measures")

    n_tuples = math.prod(m.n_atoms for m in measures)
    if _contraction_available(kernel, d) and n_tuples * queries.shape[0] > _FAST_SWITCH:
        return np.asarray(_poly_partial(kernel.pair_poly, measures, queries))

    if n_tuples > _DENSE_LIMIT:
        raise ValueError("too many atom tuples for the dense potential route")
    out = np.empty(queries.shape[0])
    letters = "abcd"[:j]
    spec = letters + "," + ",".join(letters) + "->"
    for qi in range(queries.shape[0]):
        pinned = _pin_unchecked(kernel, queries[qi])
        vals = _tuple_grid_values(pinned, [m.atoms for m in measures])
        out[qi] = np.einsum(spec, vals, *[m.weights for m in measures])
    return out


def mc_energy_uniform(kernel: Kernel, d: int, tuples: int, seed: int) -> EnergyEstimate:
    """Monte-Carlo estimate of the kernel energy of the uniform measure.

    Averages the kernel over independent n-tuples of i.i.d. uniform points,
    which makes the estimator unbiased with an honest standard error
    (sample standard deviation / sqrt(tuples)).
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if tuples < 100:
        raise ValueError(f"need at least 100 tuples, got {tuples}")
    n = kernel.arity
    rng = np.random.default_rng(seed)
    chunk = max(1, 1_500_000 // n)
    done = 0
    acc = 0.0
    acc_sq = 0.0
    while done < tuples:
        count = min(chunk, tuples - done)
        pts = rng.standard_normal((count, n, d))
        norms = np.linalg.norm(pts, axis=-1, keepdims=True)
        while np.any(norms < 1e-12):
            bad = norms[..., 0] < 1e-12
            pts[bad] = rng.standard_normal((int(bad.sum()), d))
            norms = np.linalg.norm(pts, axis=-1, keepdims=True)
        vals = kernel.evaluate_batch(pts / norms)
        acc += float(vals.sum())
        acc_sq += float((vals * vals).sum())
        done += count
    mean = acc / tuples
    var = max(acc_sq / tuples - mean * mean, 0.0) * tuples / max(tuples - 1, 1)
    return EnergyEstimate(mean, math.sqrt(var / tuples), tuples)


# --- mixtures and potentials-as-kernels ------------------------------------------


@dataclass(frozen=True)
class MixturePolynomial:
    """The polynomial t -> I_K((1-t) mu + t nu) in Bernstein form.

    coefficients[k] is the mixed energy with k slots carrying nu and the
    remaining n-k slots carrying mu, so g(0) and g(1) are the pure
    energies of mu and nu.
    """

    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = self.degree
        out = np.zeros_like(t)
        for k, c in enumerate(self.coefficients):
            out = out + math.comb(n, k) * (1 - t) ** (n - k) * t**k * c
        return out if out.ndim else float(out)

    def power_coefficients(self) -> np.ndarray:
        """Coefficients a_m with g(t) = sum_m a_m t^m."""
        n = self.degree
        a = np.zeros(n + 1)
        for k, c in enumerate(self.coefficients):
            for m in range(k, n + 1):
                a[m] += math.comb(n, k) * math.comb(n - k, m - k) * (-1.0) ** (m - k) * c
        return a

    def derivative(self, t, order: int = 1):
        a = self.power_coefficients()
        for _ in range(order):
            a = a[1:] * np.arange(1, len(a))
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for m, coeff in enumerate(a):
            out = out + coeff * t**m
        return out if out.ndim else float(out)

    def derivative1_at_zero(self) -> float:
        c = self.coefficients
        return self.degree * (c[1] - c[0])

    def derivative2_at_zero(self) -> float:
        c = self.coefficients
        n = self.degree
        return n * (n - 1) * (c[0] - 2 * c[1] + c[2])


def mixture_polynomial(kernel: Kernel, mu: DiscreteMeasure, nu: DiscreteMeasure) -> MixturePolynomial:
    """Exact mixed energies of (1-t) mu + t nu, as a Bernstein polynomial."""
    if not (mu.is_probability and nu.is_probability):
        raise ValueError("mixture polynomials are defined for probability measures")
    if mu.dimension != nu.dimension:
        raise ValueError("measures must share a dimension")
    n = kernel.arity
    coeffs = np.array([
        mutual_energy(kernel, [mu] * (n - k) + [nu] * k).value for k in range(n + 1)
    ])
    return MixturePolynomial(coeffs)


class PotentialKernel(Kernel):
    """Lower-arity kernel obtained by integrating leading slots of a base
    kernel against fixed measures."""

    def __init__(self, base: Kernel, measures):
        measures = list(measures)
        j = len(measures)
        if not 1 <= j <= base.arity - 2:
            raise ValueError("potential kernels need 1 <= j <= arity - 2 integrated slots")
        super().__init__(f"potential({base.name},j={j})", base.arity - j,
                         rotation_invariant=False)
        self._base = base
        self._measures = measures

    @property
    def base(self) -> Kernel:
        return self._base

    @property
    def measures(self) -> list:
        return list(self._measures)

    def evaluate_batch(self, pts):
        pts = self._check_points(pts)
        batch = pts.shape[:-2]
        flat = pts.reshape((-1,) + pts.shape[-2:])
        vals = potential(self._base, self._measures, flat)
        return vals.reshape(batch)
