"""Catalog of symmetric n-input kernels plus lifting constructions.

Most kernels here are polynomials in the pairwise inner products of their
arguments; :class:`PairPolynomial` is the shared backbone that stores such
polynomials over a set of free slots and optional fixed anchor points.  It
supports exact evaluation on batches, analytic gradients, pinning of slots,
and the sum/product algebra needed to build higher-arity kernels out of
lower-arity ones.

Gram-variable naming for three inputs (x, y, z):

    u = <x, y>,   v = <y, z>,   t = <z, x>.

Kernels evaluate on raw coordinate vectors, so they remain usable for any
embedded point set, although the catalog semantics (e.g. squared triangle
area) assume unit vectors.
"""
from __future__ import annotations

import itertools
import warnings

import numpy as np

__all__ = [
    "Kernel",
    "PolynomialKernel",
    "RieszKernel",
    "ExpUvtKernel",
    "PinnedKernel",
    "ShiftedKernel",
    "inner",
    "riesz",
    "frame2",
    "prod_f_uvt",
    "uvt",
    "vol2",
    "neg_vol2",
    "area2",
    "neg_area2",
    "s011",
    "s100",
    "quad_a",
    "sum_lift",
    "prod_lift",
    "pin",
    "cpd_shift",
    "parse_kernel",
    "KERNEL_REGISTRY",
]

# Hard cap on polynomial size when merging; beyond this, constructions fall
# back to generic (loop-over-subsets) evaluation.
_MAX_TERMS = 600


def _canonical(mono) -> tuple:
    return tuple(sorted(mono))


class PairPolynomial:
    """Polynomial in pairwise inner products of slots and anchors.

    Index convention: 0..nslots-1 are free slots, nslots..nslots+m-1 refer
    to the m anchor points.  A monomial is a sorted tuple of
    ((i, j), power) entries with i < j; the empty tuple is the constant
    term.  Anchor-anchor pairs are folded into coefficients eagerly, so
    they never appear in stored monomials.
    """

    def __init__(self, terms: dict, nslots: int, anchors: np.ndarray | None = None):
        self.nslots = int(nslots)
        if anchors is None or len(anchors) == 0:
            self.anchors = np.zeros((0, 0))
        else:
            self.anchors = np.asarray(anchors, dtype=float)
        clean: dict = {}
        for mono, coeff in terms.items():
            mono = _canonical(tuple((tuple(p), int(e)) for p, e in mono if e != 0))
            if coeff == 0.0:
                continue
            clean[mono] = clean.get(mono, 0.0) + float(coeff)
        self.terms = {m: c for m, c in clean.items() if c != 0.0}

    # -- helpers ------------------------------------------------------------

    @property
    def n_anchors(self) -> int:
        return self.anchors.shape[0]

    def max_power(self) -> int:
        best = 0
        for mono in self.terms:
            for _, e in mono:
                best = max(best, e)
        return best

    def _vector(self, idx: int, pts: np.ndarray):
        if idx < self.nslots:
            return pts[..., idx, :]
        return self.anchors[idx - self.nslots]

    def _pair_values(self, pts: np.ndarray) -> dict:
        pairs = {p for mono in self.terms for p, _ in mono}
        out = {}
        for a, b in pairs:
            va, vb = self._vector(a, pts), self._vector(b, pts)
            out[(a, b)] = np.einsum("...d,...d->...", va, np.broadcast_to(vb, va.shape))
        return out

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate on points of shape (..., nslots, d)."""
        batch = pts.shape[:-2]
        vals = self._pair_values(pts)
        total = np.zeros(batch)
        for mono, coeff in self.terms.items():
            term = np.full(batch, coeff)
            for pair, e in mono:
                term = term * vals[pair] ** e
            total = total + term
        return total

    def gradient(self, pts: np.ndarray) -> np.ndarray:
        """Euclidean gradient with respect to every slot: (..., nslots, d)."""
        batch = pts.shape[:-2]
        vals = self._pair_values(pts)
        grad = np.zeros(batch + (self.nslots, pts.shape[-1]))
        for mono, coeff in self.terms.items():
            factors = [vals[pair] ** e for pair, e in mono]
            for k, (pair, e) in enumerate(mono):
                partial = np.full(batch, coeff * e)
                for j, f in enumerate(factors):
                    if j != k:
                        partial = partial * f
                partial = partial * vals[pair] ** (e - 1)
                a, b = pair
                if a < self.nslots:
                    grad[..., a, :] += partial[..., None] * np.broadcast_to(
                        self._vector(b, pts), pts[..., a, :].shape
                    )
                if b < self.nslots:
                    grad[..., b, :] += partial[..., None] * np.broadcast_to(
                        self._vector(a, pts), pts[..., b, :].shape
                    )
        return grad

    # -- algebra ------------------------------------------------------------

    def scaled(self, c: float) -> "PairPolynomial":
        return PairPolynomial({m: c * v for m, v in self.terms.items()}, self.nslots, self.anchors)

    def shifted_constant(self, c: float) -> "PairPolynomial":
        terms = dict(self.terms)
        terms[()] = terms.get((), 0.0) + c
        return PairPolynomial(terms, self.nslots, self.anchors)

    def _merge_anchor_space(self, other: "PairPolynomial"):
        """Index remappings for combining two polynomials on shared slots."""
        if self.nslots != other.nslots:
            raise ValueError("polynomials must share slot count")
        ns = self.nslots
        if self.n_anchors and other.n_anchors and self.anchors.shape[1] != other.anchors.shape[1]:
            raise ValueError("anchor dimensions differ")
        if self.n_anchors == 0:
            anchors = other.anchors
        elif other.n_anchors == 0:
            anchors = self.anchors
        else:
            anchors = np.vstack([self.anchors, other.anchors])

        def remap_other(idx: int) -> int:
            return idx if idx < ns else idx + self.n_anchors

        return anchors, remap_other

    def plus(self, other: "PairPolynomial") -> "PairPolynomial":
        anchors, remap = self._merge_anchor_space(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            mono = _canonical(tuple(((remap(a), remap(b)), e) for (a, b), e in mono))
            terms[mono] = terms.get(mono, 0.0) + coeff
        return PairPolynomial(terms, self.nslots, anchors)

    def times(self, other: "PairPolynomial") -> "PairPolynomial":
        anchors, remap = self._merge_anchor_space(other)
        if len(self.terms) * len(other.terms) > _MAX_TERMS:
            raise OverflowError("polynomial product too large")
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                merged: dict = {p: e for p, e in m1}
                for (a, b), e in m2:
                    p = (remap(a), remap(b))
                    p = (min(p), max(p))
                    merged[p] = merged.get(p, 0) + e
                key = _canonical(tuple(merged.items()))
                terms[key] = terms.get(key, 0.0) + c1 * c2
        return PairPolynomial(terms, self.nslots, anchors)

    def relabeled(self, slot_map: dict, new_nslots: int) -> "PairPolynomial":
        """Send slot i to slot_map[i]; anchors keep their order behind the
        new slot block."""

        def remap(idx: int) -> int:
            if idx < self.nslots:
                return slot_map[idx]
            return idx - self.nslots + new_nslots

        terms = {}
        for mono, coeff in self.terms.items():
            key = _canonical(tuple((tuple(sorted((remap(a), remap(b)))), e) for (a, b), e in mono))
            terms[key] = terms.get(key, 0.0) + coeff
        return PairPolynomial(terms, new_nslots, self.anchors)

    def pinned(self, point: np.ndarray) -> "PairPolynomial":
        """Fix slot 0 at ``point``; the point becomes the last anchor."""
        point = np.asarray(point, dtype=float)
        ns = self.nslots
        if ns < 1:
            raise ValueError("no slot to pin")
        new_ns = ns - 1
        pinned_idx = new_ns + self.n_anchors  # appended last

        def remap(idx: int) -> int:
            if idx == 0:
                return pinned_idx
            if idx < ns:
                return idx - 1
            return idx - ns + new_ns

        anchors = point[None, :] if self.n_anchors == 0 else np.vstack([self.anchors, point[None, :]])

        terms: dict = {}
        for mono, coeff in self.terms.items():
            new_pairs: dict = {}
            c = coeff
            for (a, b), e in mono:
                na, nb = remap(a), remap(b)
                na, nb = min(na, nb), max(na, nb)
                if na >= new_ns and nb >= new_ns:
                    # both endpoints fixed: fold the numeric inner product
                    va = anchors[na - new_ns]
                    vb = anchors[nb - new_ns]
                    c *= float(np.dot(va, vb)) ** e
                else:
                    new_pairs[(na, nb)] = new_pairs.get((na, nb), 0) + e
            key = _canonical(tuple(new_pairs.items()))
            terms[key] = terms.get(key, 0.0) + c
        return PairPolynomial(terms, new_ns, anchors)


class Kernel:
    """A symmetric continuous kernel of fixed arity.

    Subclasses implement :meth:`evaluate_batch`; everything else (scalar
    convenience calls, arithmetic, permutation helpers) lives here.
    ``pair_poly`` is set when the kernel is an explicit pair-inner-product
    polynomial, which unlocks analytic gradients and fast exact energies.
    """

    def __init__(self, name: str, arity: int, *, rotation_invariant: bool,
                 params: dict | None = None, nonnegative: bool = False,
                 pair_poly: PairPolynomial | None = None):
        self.name = name
        self.arity = int(arity)
        self.rotation_invariant = bool(rotation_invariant)
        self.params = dict(params or {})
        self.nonnegative = bool(nonnegative)
        self.pair_poly = pair_poly

    # -- evaluation ----------------------------------------------------------

    def evaluate_batch(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradient_batch(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"kernel '{self.name}' has no analytic gradient")

    def _check_points(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if pts.ndim < 2 or pts.shape[-2] != self.arity:
            raise ValueError(
                f"kernel '{self.name}' takes {self.arity} points, got shape {pts.shape}"
            )
        if self.pair_poly is not None and self.pair_poly.n_anchors:
            if pts.shape[-1] != self.pair_poly.anchors.shape[1]:
                raise ValueError("point dimension does not match pinned points")
        return pts

    def evaluate(self, pts) -> float:
        """Evaluate on one n-tuple of points given as an (n, d) array."""
        pts = self._check_points(pts)
        return float(self.evaluate_batch(pts[None, ...])[0])

    def __call__(self, *points) -> float:
        return self.evaluate(np.stack([np.asarray(p, dtype=float) for p in points]))

    # -- algebra --------------------------------------------------------------

    def __add__(self, other: "Kernel") -> "Kernel":
        if not isinstance(other, Kernel):
            return NotImplemented
        if other.arity != self.arity:
            raise ValueError("can only add kernels of equal arity")
        if self.pair_poly is not None and other.pair_poly is not None:
            return PolynomialKernel(
                f"({self.name}+{other.name})", self.pair_poly.plus(other.pair_poly),
                rotation_invariant=self.rotation_invariant and other.rotation_invariant,
            )
        return _SumKernel(self, other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self._scaled(float(other))
        if not isinstance(other, Kernel):
            return NotImplemented
        if other.arity != self.arity:
            raise ValueError("can only multiply kernels of equal arity")
        if self.pair_poly is not None and other.pair_poly is not None:
            try:
                poly = self.pair_poly.times(other.pair_poly)
            except OverflowError:
                return _ProductKernel(self, other)
            return PolynomialKernel(
                f"({self.name}*{other.name})", poly,
                rotation_invariant=self.rotation_invariant and other.rotation_invariant,
                nonnegative=self.nonnegative and other.nonnegative,
            )
        return _ProductKernel(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "Kernel":
        return self._scaled(-1.0)

    def _scaled(self, c: float) -> "Kernel":
        if self.pair_poly is not None:
            return PolynomialKernel(
                f"({c:g}*{self.name})", self.pair_poly.scaled(c),
                rotation_invariant=self.rotation_invariant,
                nonnegative=self.nonnegative and c >= 0,
            )
        return _ScaledKernel(self, c)

    def spec_string(self) -> str:
        """Canonical ``name[:key=value,...]`` rendering for reports."""
        if not self.params:
            return self.name
        parts = []
        for k in sorted(self.params):
            v = self.params[k]
            if isinstance(v, (list, tuple)):
                parts.append(f"{k}=" + ",".join(f"{x:g}" for x in v))
            elif isinstance(v, bool):
                parts.append(f"{k}={'true' if v else 'false'}")
            else:
                parts.append(f"{k}={v}")
        return self.name + ":" + ",".join(parts)

    def __repr__(self) -> str:
        return f"<Kernel {self.name} arity={self.arity}>"


class PolynomialKernel(Kernel):
    """Kernel backed by an explicit :class:`PairPolynomial`."""

    def __init__(self, name, poly: PairPolynomial, *, rotation_invariant,
                 params=None, nonnegative=False):
        super().__init__(name, poly.nslots, rotation_invariant=rotation_invariant,
                         params=params, nonnegative=nonnegative, pair_poly=poly)

    def evaluate_batch(self, pts):
        return self.pair_poly.evaluate(self._check_points(pts))

    def gradient_batch(self, pts):
        return self.pair_poly.gradient(self._check_points(pts))


class _SumKernel(Kernel):
    def __init__(self, a: Kernel, b: Kernel):
        super().__init__(f"({a.name}+{b.name})", a.arity,
                         rotation_invariant=a.rotation_invariant and b.rotation_invariant)
        self._a, self._b = a, b

    def evaluate_batch(self, pts):
        return self._a.evaluate_batch(pts) + self._b.evaluate_batch(pts)

    def gradient_batch(self, pts):
        return self._a.gradient_batch(pts) + self._b.gradient_batch(pts)


class _ProductKernel(Kernel):
    def __init__(self, a: Kernel, b: Kernel):
        super().__init__(f"({a.name}*{b.name})", a.arity,
                         rotation_invariant=a.rotation_invariant and b.rotation_invariant,
                         nonnegative=a.nonnegative and b.nonnegative)
        self._a, self._b = a, b

    def evaluate_batch(self, pts):
        return self._a.evaluate_batch(pts) * self._b.evaluate_batch(pts)

    def gradient_batch(self, pts):
        fa = self._a.evaluate_batch(pts)[..., None, None]
        fb = self._b.evaluate_batch(pts)[..., None, None]
        return fa * self._b.gradient_batch(pts) + fb * self._a.gradient_batch(pts)


class _ScaledKernel(Kernel):
    def __init__(self, base: Kernel, c: float):
        super().__init__(f"({c:g}*{base.name})", base.arity,
                         rotation_invariant=base.rotation_invariant,
                         nonnegative=base.nonnegative and c >= 0)
        self._base, self._c = base, c

    def evaluate_batch(self, pts):
        return self._c * self._base.evaluate_batch(pts)

    def gradient_batch(self, pts):
        return self._c * self._base.gradient_batch(pts)


class RieszKernel(Kernel):
    """Two-input distance power ||x - y||^s for s > 0."""

    def __init__(self, s: float):
        if s <= 0:
            raise ValueError("riesz exponent must be positive")
        super().__init__("riesz", 2, rotation_invariant=True, params={"s": s},
                         nonnegative=True)
        self.s = float(s)

    def evaluate_batch(self, pts):
        pts = self._check_points(pts)
        diff = pts[..., 0, :] - pts[..., 1, :]
        return np.linalg.norm(diff, axis=-1) ** self.s

    def gradient_batch(self, pts):
        # grad_x ||x-y||^s = s ||x-y||^{s-2} (x-y); singular at coincident
        # points when s < 2, where the caller is expected to fall back to
        # finite differences.
        pts = self._check_points(pts)
        diff = pts[..., 0, :] - pts[..., 1, :]
        dist = np.linalg.norm(diff, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(dist > 0, self.s * dist ** (self.s - 2.0), 0.0)
        g = np.zeros_like(pts)
        g[..., 0, :] = scale[..., None] * diff
        g[..., 1, :] = -scale[..., None] * diff
        return g


def _uvt_poly() -> PairPolynomial:
    return PairPolynomial({(((0, 1), 1), ((0, 2), 1), ((1, 2), 1)): 1.0}, 3)


class ExpUvtKernel(Kernel):
    """Three-input kernel exp(uvt)."""

    def __init__(self):
        super().__init__("prod_f_uvt", 3, rotation_invariant=True,
                         params={"f": "exp"}, nonnegative=True)
        self._uvt = _uvt_poly()

    def evaluate_batch(self, pts):
        return np.exp(self._uvt.evaluate(self._check_points(pts)))

    def gradient_batch(self, pts):
        pts = self._check_points(pts)
        val = np.exp(self._uvt.evaluate(pts))
        return val[..., None, None] * self._uvt.gradient(pts)


class PinnedKernel(Kernel):
    """Generic lower-arity view of a kernel with leading slots fixed."""

    def __init__(self, base: Kernel, pins: np.ndarray):
        pins = np.atleast_2d(np.asarray(pins, dtype=float))
        super().__init__(f"pin({base.name})", base.arity - pins.shape[0],
                         rotation_invariant=False,
                         params=dict(base.params, pins=pins.shape[0]))
        self._base, self._pins = base, pins

    def evaluate_batch(self, pts):
        pts = self._check_points(pts)
        batch = pts.shape[:-2]
        pinned = np.broadcast_to(self._pins, batch + self._pins.shape)
        return self._base.evaluate_batch(np.concatenate([pinned, pts], axis=-2))

    def gradient_batch(self, pts):
        pts = self._check_points(pts)
        batch = pts.shape[:-2]
        pinned = np.broadcast_to(self._pins, batch + self._pins.shape)
        full = self._base.gradient_batch(np.concatenate([pinned, pts], axis=-2))
        return full[..., self._pins.shape[0]:, :]


class ShiftedKernel(Kernel):
    """Anchor-shifted two-input kernel.

    standard: phi(x, y)  = G(x, y) + G(x0, x0) - G(x, x0) - G(x0, y)
    zero:     phi0(x, y) = G(x, y) - G(x, x0) - G(x0, y)
    """

    def __init__(self, base: Kernel, x0: np.ndarray, variant: str = "standard"):
        if base.arity != 2:
            raise ValueError("cpd_shift applies to two-input kernels")
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        diag = base(x0, x0)
        if variant == "zero" and diag > 0:
            raise ValueError("zero-variant shift requires G(x0, x0) <= 0")
        if variant not in ("standard", "zero"):
            raise ValueError(f"unknown shift variant '{variant}'")
        super().__init__(f"shift({base.name})", 2, rotation_invariant=False,
                         params={"variant": variant})
        self._base, self._x0 = base, x0
        self._diag = diag if variant == "standard" else 0.0

    def evaluate_batch(self, pts):
        pts = self._check_points(pts)
        batch = pts.shape[:-2]
        x, y = pts[..., 0, :], pts[..., 1, :]
        x0 = np.broadcast_to(self._x0, x.shape)
        main = self._base.evaluate_batch(pts)
        cross_x = self._base.evaluate_batch(np.stack([x, x0], axis=-2))
        cross_y = self._base.evaluate_batch(np.stack([x0, y], axis=-2))
        return main + np.full(batch, self._diag) - cross_x - cross_y


# --- catalog -----------------------------------------------------------------

_U = ((0, 1), 1)
_V = ((1, 2), 1)
_T = ((0, 2), 1)
_U2 = ((0, 1), 2)
_V2 = ((1, 2), 2)
_T2 = ((0, 2), 2)


def inner() -> Kernel:
    """<x, y>."""
    return PolynomialKernel("inner", PairPolynomial({(_U,): 1.0}, 2), rotation_invariant=True)


def riesz(s: float) -> Kernel:
    """||x - y||^s for s > 0."""
    return RieszKernel(s)


def frame2() -> Kernel:
    """<x, y>^2 (the frame energy kernel)."""
    return PolynomialKernel("frame2", PairPolynomial({(_U2,): 1.0}, 2),
                            rotation_invariant=True, nonnegative=True)


def prod_f_uvt(coeffs=None, f: str | None = None) -> Kernel:
    """f(uvt) for f a nonnegative-coefficient polynomial, or f = exp."""
    if f == "exp":
        return ExpUvtKernel()
    if coeffs is None:
        raise ValueError("prod_f_uvt needs polynomial coefficients or f='exp'")
    coeffs = [float(c) for c in np.atleast_1d(coeffs)]
    if any(c < 0 for c in coeffs):
        raise ValueError("prod_f_uvt requires nonnegative coefficients")
    terms = {}
    for k, c in enumerate(coeffs):
        if c == 0.0:
            continue
        mono = () if k == 0 else (((0, 1), k), ((0, 2), k), ((1, 2), k))
        terms[mono] = c
    if not terms:
        terms = {(): 0.0}
    return PolynomialKernel("prod_f_uvt", PairPolynomial(terms, 3),
                            rotation_invariant=True, params={"coeffs": coeffs})


def uvt() -> Kernel:
    """u v t = <x,y> <y,z> <z,x>."""
    return PolynomialKernel("uvt", PairPolynomial({(_U, _V, _T): 1.0}, 3),
                            rotation_invariant=True)


def vol2() -> Kernel:
    """Squared volume of the parallelepiped spanned by x, y, z:
    1 - u^2 - v^2 - t^2 + 2 u v t (the Gram determinant)."""
    terms = {(): 1.0, (_U2,): -1.0, (_V2,): -1.0, (_T2,): -1.0, (_U, _V, _T): 2.0}
    return PolynomialKernel("vol2", PairPolynomial(terms, 3),
                            rotation_invariant=True, nonnegative=True)


def neg_vol2() -> Kernel:
    """Negated squared parallelepiped volume."""
    return PolynomialKernel("neg_vol2", vol2().pair_poly.scaled(-1.0),
                            rotation_invariant=True)


def area2() -> Kernel:
    """Squared area of the triangle with vertices x, y, z:
    3/4 - (u+v+t)/2 + (uv+vt+tu)/2 - (u^2+v^2+t^2)/4."""
    terms = {
        (): 0.75,
        (_U,): -0.5, (_V,): -0.5, (_T,): -0.5,
        (_U, _V): 0.5, (_V, _T): 0.5, (_U, _T): 0.5,
        (_U2,): -0.25, (_V2,): -0.25, (_T2,): -0.25,
    }
    return PolynomialKernel("area2", PairPolynomial(terms, 3),
                            rotation_invariant=True, nonnegative=True)


def neg_area2() -> Kernel:
    """Negated squared triangle area."""
    return PolynomialKernel("neg_area2", area2().pair_poly.scaled(-1.0),
                            rotation_invariant=True)


def s011() -> Kernel:
    """u v + v t + t u."""
    terms = {(_U, _V): 1.0, (_V, _T): 1.0, (_U, _T): 1.0}
    return PolynomialKernel("s011", PairPolynomial(terms, 3), rotation_invariant=True)


def s100() -> Kernel:
    """(t - uv) + (u - vt) + (v - tu)."""
    terms = {(_U,): 1.0, (_V,): 1.0, (_T,): 1.0,
             (_U, _V): -1.0, (_V, _T): -1.0, (_U, _T): -1.0}
    return PolynomialKernel("s100", PairPolynomial(terms, 3), rotation_invariant=True)


def quad_a(a: float, shift: bool = False) -> Kernel:
    """t^2 + u^2 + v^2 - a*uvt, optionally plus the constant 1/(1-a).

    The shifted form requires a < 1 (the constant diverges at a = 1); the
    shiftless form stays valid for a <= 1.
    """
    a = float(a)
    if shift and a == 1.0:
        raise ValueError("quad_a with shift requires a != 1")
    terms = {(_U2,): 1.0, (_V2,): 1.0, (_T2,): 1.0, (_U, _V, _T): -a}
    if shift:
        terms[()] = 1.0 / (1.0 - a)
    return PolynomialKernel("quad_a", PairPolynomial(terms, 3),
                            rotation_invariant=True, params={"a": a, "shift": shift})


# --- lifting constructions ----------------------------------------------------


class _SubsetLiftKernel(Kernel):
    """Generic sum/product of a base kernel over all m-subsets of n slots."""

    def __init__(self, base: Kernel, n: int, mode: str):
        name = f"{'sum' if mode == 'sum' else 'prod'}_lift({base.name},n={n})"
        super().__init__(name, n, rotation_invariant=base.rotation_invariant,
                         params={"base": base.name, "n": n},
                         nonnegative=base.nonnegative)
        self._base, self._mode = base, mode
        self._subsets = list(itertools.combinations(range(n), base.arity))

    def evaluate_batch(self, pts):
        pts = self._check_points(pts)
        out = None
        for subset in self._subsets:
            val = self._base.evaluate_batch(pts[..., list(subset), :])
            if out is None:
                out = val.copy()
            elif self._mode == "sum":
                out = out + val
            else:
                out = out * val
        return out


def _lift_common(base: Kernel, n: int):
    m = base.arity
    if not 2 <= m <= n - 1:
        raise ValueError(f"lift requires 2 <= arity(base) <= n-1, got arity {m}, n {n}")
    return list(itertools.combinations(range(n), m))


def sum_lift(base: Kernel, n: int) -> Kernel:
    """Sum of ``base`` over all arity(base)-subsets of n inputs."""
    subsets = _lift_common(base, n)
    if base.pair_poly is not None:
        poly = None
        for subset in subsets:
            part = base.pair_poly.relabeled({i: s for i, s in enumerate(subset)}, n)
            poly = part if poly is None else poly.plus(part)
        k = PolynomialKernel(f"sum_lift({base.name},n={n})", poly,
                             rotation_invariant=base.rotation_invariant,
                             params={"base": base.name, "n": n})
        return k
    return _SubsetLiftKernel(base, n, "sum")


def prod_lift(base: Kernel, n: int) -> Kernel:
    """Product of ``base`` over all arity(base)-subsets of n inputs."""
    subsets = _lift_common(base, n)
    if not base.nonnegative and base.arity < n - 1:
        warnings.warn(
            "product lift of a possibly-negative kernel with arity < n-1 "
            "need not preserve positive definiteness",
            stacklevel=2,
        )
    if base.pair_poly is not None:
        poly = None
        try:
            for subset in subsets:
                part = base.pair_poly.relabeled({i: s for i, s in enumerate(subset)}, n)
                poly = part if poly is None else poly.times(part)
        except OverflowError:
            poly = None
        if poly is not None:
            return PolynomialKernel(f"prod_lift({base.name},n={n})", poly,
                                    rotation_invariant=base.rotation_invariant,
                                    params={"base": base.name, "n": n},
                                    nonnegative=base.nonnegative)
    return _SubsetLiftKernel(base, n, "prod")


def pin(kernel: Kernel, pins) -> Kernel:
    """Fix the leading slots of ``kernel`` at concrete points.

    With m pins, returns the (n-m)-input kernel
    (z_1,...,z_m fixed) -> K(z_1,...,z_m, x_1,...,x_{n-m}).
    Requires 1 <= m <= n-2 so the result keeps at least two inputs.
    """
    pins = np.atleast_2d(np.asarray(pins, dtype=float))
    m, n = pins.shape[0], kernel.arity
    if not 1 <= m <= n - 2:
        raise ValueError(f"pin count must satisfy 1 <= m <= arity-2, got {m} for arity {n}")
    return _pin_unchecked(kernel, pins)


def _pin_unchecked(kernel: Kernel, pins: np.ndarray) -> Kernel:
    """Pinning without the arity >= 2 floor (internal use by potentials)."""
    pins = np.atleast_2d(np.asarray(pins, dtype=float))
    if pins.shape[0] >= kernel.arity:
        raise ValueError("cannot pin all slots")
    if kernel.pair_poly is not None:
        poly = kernel.pair_poly
        for p in pins:
            poly = poly.pinned(p)
        return PolynomialKernel(f"pin({kernel.name})", poly, rotation_invariant=False,
                                params=dict(kernel.params, pins=pins.shape[0]))
    return PinnedKernel(kernel, pins)


def cpd_shift(kernel: Kernel, x0, variant: str = "standard") -> Kernel:
    """Anchor shift turning conditional positive definiteness into plain.

    standard: G(x,y) + G(x0,x0) - G(x,x0) - G(x0,y); the 'zero' variant
    drops the diagonal constant and requires G(x0,x0) <= 0.
    """
    return ShiftedKernel(kernel, np.asarray(x0, dtype=float), variant)


# --- CLI kernel grammar -------------------------------------------------------

KERNEL_REGISTRY = {
    "inner": inner,
    "riesz": riesz,
    "frame2": frame2,
    "prod_f_uvt": prod_f_uvt,
    "uvt": uvt,
    "vol2": vol2,
    "neg_vol2": neg_vol2,
    "area2": area2,
    "neg_area2": neg_area2,
    "s011": s011,
    "s100": s100,
    "quad_a": quad_a,
}

_LIFTS = {"sum_lift": sum_lift, "prod_lift": prod_lift}


def _parse_value(raw: str):
    low = raw.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw.strip()


def parse_kernel(spec: str) -> Kernel:
    """Build a kernel from a ``name[:key=value,...]`` string.

    Comma-separated values after a list-valued key extend that list, so
    ``prod_f_uvt:coeffs=0,1`` is f(w) = w.  Lifted kernels are addressed
    as ``sum_lift:base=inner,n=3`` (base given by catalog name).
    """
    spec = spec.strip()
    name, _, tail = spec.partition(":")
    name = name.strip()
    kwargs: dict = {}
    last_list_key = None
    if tail:
        for token in tail.split(","):
            token = token.strip()
            if not token:
                continue
            if "=" in token:
                key, _, raw = token.partition("=")
                key = key.strip()
                val = _parse_value(raw)
                if key == "coeffs":
                    kwargs[key] = [float(val)]
                    last_list_key = key
                else:
                    kwargs[key] = val
                    last_list_key = None
            elif token == "exp":
                kwargs["f"] = "exp"
                last_list_key = None
            elif last_list_key is not None:
                kwargs[last_list_key].append(float(_parse_value(token)))
            else:
                raise ValueError(f"cannot parse kernel token '{token}' in '{spec}'")
    if name in _LIFTS:
        base_name = kwargs.pop("base", None)
        n = kwargs.pop("n", None)
        if base_name is None or n is None:
            raise ValueError(f"{name} needs base=<catalog name> and n=<arity>")
        if kwargs:
            raise ValueError(f"unknown parameters for {name}: {sorted(kwargs)}")
        if base_name not in KERNEL_REGISTRY:
            raise ValueError(f"unknown base kernel '{base_name}'")
        return _LIFTS[name](KERNEL_REGISTRY[base_name](), int(n))
    if name not in KERNEL_REGISTRY:
        known = ", ".join(sorted(KERNEL_REGISTRY) + sorted(_LIFTS))
        raise ValueError(f"unknown kernel '{name}' (known: {known})")
    try:
        return KERNEL_REGISTRY[name](**kwargs)
    except TypeError as exc:
        raise ValueError(f"bad parameters for kernel '{name}': {exc}") from None
