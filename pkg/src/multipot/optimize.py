"""Sphere-constrained particle descent for discrete energies.

Projected gradient descent with Armijo backtracking and retraction: the
Euclidean gradient of the discrete energy is projected to the tangent
space at each particle, a step is taken, and the particles are
renormalized.  Runs are deterministic given the optimizer seed; energies
along an accepted trajectory never get worse (up to 1e-12).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .geometry import DiscreteMeasure, PointConfiguration, sample_sphere
from .kernels import Kernel, RieszKernel
from .energy import MixturePolynomial, _tuple_grid_values, mixture_polynomial

__all__ = [
    "OptimizerConfig",
    "OptimizationTrace",
    "energy_gradient",
    "optimize_discrete",
    "multistart",
    "local_min_probe",
    "DirectionProbe",
]

_ARMIJO = 1e-4
_BACKTRACK = 0.5


@dataclass(frozen=True)
class OptimizerConfig:
    steps: int = 500
    step_size: float = 0.1
    seed: int = 0
    maximize: bool = False
    grad_mode: str = "analytic"          # or "finite_difference"
    fd_epsilon: float = 1e-6
    stop_tol: float = 1e-8

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.step_size <= 0:
            raise ValueError("step size must be positive")
        if self.grad_mode not in ("analytic", "finite_difference"):
            raise ValueError(f"unknown gradient mode '{self.grad_mode}'")
        if self.grad_mode == "finite_difference" and not 1e-8 <= self.fd_epsilon <= 1e-4:
            raise ValueError("fd_epsilon must lie in [1e-8, 1e-4]")


@dataclass(frozen=True)
class OptimizationTrace:
    energies: list[float]
    final_config: PointConfiguration
    converged: bool
    iterations_run: int

    @property
    def final_energy(self) -> float:
        return self.energies[-1]


_LETTERS = "abcdef"


def _gram_fast_applicable(kernel: Kernel) -> bool:
    poly = kernel.pair_poly
    return poly is not None and poly.n_anchors == 0 and poly.nslots <= 4


def _gram_powers(gram: np.ndarray):
    cache = {0: np.ones_like(gram), 1: gram}

    def power(e: int) -> np.ndarray:
        top = max(cache)
        while top < e:
            top += 1
            cache[top] = cache[top - 1] * gram
        return cache[e]

    return power


def _poly_energy_gram(kernel: Kernel, pts: np.ndarray) -> float:
    """Discrete energy of a pair polynomial straight from the Gram matrix."""
    poly = kernel.pair_poly
    n_pts = pts.shape[0]
    n = poly.nslots
    power = _gram_powers(pts @ pts.T)
    total = 0.0
    for mono, coeff in poly.terms.items():
        if not mono:
            total += coeff * n_pts**n
            continue
        subs, ops, used = [], [], set()
        for (i, j), e in mono:
            subs.append(_LETTERS[i] + _LETTERS[j])
            ops.append(power(e))
            used.update((i, j))
        val = float(np.einsum(",".join(subs) + "->", *ops))
        total += coeff * val * n_pts ** (n - len(used))
    return total / n_pts**n


def _poly_gradient_gram(kernel: Kernel, pts: np.ndarray) -> np.ndarray:
    """Euclidean gradient of the discrete energy via d/dGram chain rule."""
    poly = kernel.pair_poly
    n_pts = pts.shape[0]
    n = poly.nslots
    gram = pts @ pts.T
    power = _gram_powers(gram)
    dedg = np.zeros_like(gram)
    ones = np.ones(n_pts)
    for mono, coeff in poly.terms.items():
        for k, ((i, j), e) in enumerate(mono):
            out = _LETTERS[i] + _LETTERS[j]
            subs, ops = [], []
            covered = {i, j}
            for kk, ((a, b), ee) in enumerate(mono):
                if kk == k:
                    continue
                subs.append(_LETTERS[a] + _LETTERS[b])
                ops.append(power(ee))
                covered.update((a, b))
            for s in (i, j):
                if not any(s in (a, b) for kk, ((a, b), _) in enumerate(mono) if kk != k):
                    subs.append(_LETTERS[s])
                    ops.append(ones)
            if ops:
                rest = np.einsum(",".join(subs) + "->" + out, *ops)
            else:
                rest = np.ones_like(gram)
            scale = n_pts ** (n - len(covered))
            dedg += (coeff * e * scale) * power(e - 1) * rest
    return (dedg + dedg.T) @ pts / n_pts**n


def _raw_energy(kernel: Kernel, pts: np.ndarray) -> float:
    if _gram_fast_applicable(kernel):
        return _poly_energy_gram(kernel, pts)
    n = pts.shape[0]
    vals = _tuple_grid_values(kernel, [pts] * kernel.arity)
    return float(vals.sum()) / n**kernel.arity


def _raw_gradient(kernel: Kernel, pts: np.ndarray) -> np.ndarray:
    """Euclidean gradient of the discrete energy with respect to every
    point, shape (N, d)."""
    if _gram_fast_applicable(kernel):
        return _poly_gradient_gram(kernel, pts)
    n_arity = kernel.arity
    n, d = pts.shape
    grad = np.zeros((n, d))
    rest = n ** (n_arity - 1)
    chunk = max(1, 2_000_000 // max(rest, 1))
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        block = (stop - start,) + (n,) * (n_arity - 1)
        grid = np.empty(block + (n_arity, d))
        for s in range(n_arity):
            seg = pts[start:stop] if s == 0 else pts
            shape = [1] * n_arity
            shape[s] = seg.shape[0]
            grid[..., s, :] = seg.reshape(tuple(shape) + (d,))
        g = kernel.gradient_batch(grid)
        for s in range(n_arity):
            axes = tuple(a for a in range(n_arity) if a != s)
            contribution = g[..., s, :].sum(axis=axes)
            if s == 0:
                grad[start:stop] += contribution
            else:
                grad += contribution
    return grad / n**n_arity


def _tangent(pts: np.ndarray, grad: np.ndarray) -> np.ndarray:
    radial = np.einsum("nd,nd->n", grad, pts)
    return grad - radial[:, None] * pts


def _needs_fd_fallback(kernel: Kernel, pts: np.ndarray) -> bool:
    if not (isinstance(kernel, RieszKernel) and kernel.s < 1.0):
        return False
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, np.inf)
    return bool(np.min(dist) < 1e-12)


def _fd_point_gradient(kernel: Kernel, pts: np.ndarray, i: int, eps: float) -> np.ndarray:
    d = pts.shape[1]
    grad = np.zeros(d)
    for c in range(d):
        plus = pts.copy()
        plus[i, c] += eps
        minus = pts.copy()
        minus[i, c] -= eps
        grad[c] = (_raw_energy(kernel, plus) - _raw_energy(kernel, minus)) / (2 * eps)
    return grad


def energy_gradient(kernel: Kernel, config: PointConfiguration, i: int,
                    mode: str = "analytic", fd_epsilon: float = 1e-6) -> np.ndarray:
    """Tangent-space gradient of the discrete energy with respect to the
    i-th point.

    Analytic mode differentiates through the pairwise inner products;
    finite-difference mode uses central differences in ambient
    coordinates.  Both are projected onto the tangent space at the point.
    """
    pts = np.array(config.points)
    if not 0 <= i < pts.shape[0]:
        raise ValueError(f"point index {i} out of range")
    if mode == "analytic" and _needs_fd_fallback(kernel, pts):
        warnings.warn("coincident points with a singular gradient; "
                      "falling back to finite differences", stacklevel=2)
        mode = "finite_difference"
    if mode == "analytic":
        grad = _raw_gradient(kernel, pts)[i]
    elif mode == "finite_difference":
        grad = _fd_point_gradient(kernel, pts, i, fd_epsilon)
    else:
        raise ValueError(f"unknown gradient mode '{mode}'")
    x = pts[i]
    return grad - np.dot(grad, x) * x


def _full_tangent_gradient(kernel: Kernel, pts: np.ndarray, cfg: OptimizerConfig) -> np.ndarray:
    if cfg.grad_mode == "analytic":
        if _needs_fd_fallback(kernel, pts):
            warnings.warn("coincident points with a singular gradient; "
                          "falling back to finite differences", stacklevel=2)
        else:
            return _tangent(pts, _raw_gradient(kernel, pts))
    grad = np.stack([
        _fd_point_gradient(kernel, pts, i, cfg.fd_epsilon) for i in range(pts.shape[0])
    ])
    return _tangent(pts, grad)


def _renormalize(pts: np.ndarray) -> np.ndarray:
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def optimize_discrete(kernel: Kernel, n_points: int, d: int, cfg: OptimizerConfig,
                      initial=None) -> OptimizationTrace:
    """Minimize (or maximize) the discrete energy over N points on S^{d-1}.

    Random initialization from the config seed unless ``initial`` is
    given.  The result's final energy is an upper bound on the infimum
    (lower bound on the supremum when maximizing); no optimality claim is
    made.
    """
    if n_points < 1 or d < 2:
        raise ValueError("need n_points >= 1 and d >= 2")
    if initial is None:
        pts = np.array(sample_sphere(d, n_points, cfg.seed).points)
    else:
        pts = np.array(getattr(initial, "points", initial), dtype=float)
        if pts.shape != (n_points, d):
            raise ValueError("initial configuration has the wrong shape")
        pts = _renormalize(pts)

    sign = -1.0 if cfg.maximize else 1.0   # descend on sign * E
    energy = _raw_energy(kernel, pts)
    energies = [energy]
    step = cfg.step_size
    iterations = 0
    converged = False

    for _ in range(cfg.steps):
        grad = _full_tangent_gradient(kernel, pts, cfg)
        gnorm2 = float(np.sum(grad * grad))
        if np.sqrt(gnorm2) <= cfg.stop_tol:
            converged = True
            break
        direction = -sign * grad
        t = step
        accepted = False
        for _ in range(60):
            cand = _renormalize(pts + t * direction)
            cand_energy = _raw_energy(kernel, cand)
            if sign * (cand_energy - energy) <= -_ARMIJO * t * gnorm2:
                accepted = True
                break
            t *= _BACKTRACK
        if not accepted:
            break
        pts, energy = cand, cand_energy
        energies.append(energy)
        iterations += 1
        step = min(t / _BACKTRACK, cfg.step_size)

    if not converged:
        final_grad = _full_tangent_gradient(kernel, pts, cfg)
        converged = float(np.linalg.norm(final_grad)) <= cfg.stop_tol
    return OptimizationTrace(energies, PointConfiguration(pts), converged, iterations)


def multistart(kernel: Kernel, n_points: int, d: int, cfg: OptimizerConfig,
               starts: int = 4) -> OptimizationTrace:
    """Best-of-k restarts with consecutive seeds (reported in seed order)."""
    if starts < 1:
        raise ValueError("need at least one start")
    best = None
    for k in range(starts):
        run_cfg = OptimizerConfig(
            steps=cfg.steps, step_size=cfg.step_size, seed=cfg.seed + k,
            maximize=cfg.maximize, grad_mode=cfg.grad_mode,
            fd_epsilon=cfg.fd_epsilon, stop_tol=cfg.stop_tol,
        )
        trace = optimize_discrete(kernel, n_points, d, run_cfg)
        if best is None:
            best = trace
        elif cfg.maximize and trace.final_energy > best.final_energy:
            best = trace
        elif not cfg.maximize and trace.final_energy < best.final_energy:
            best = trace
    return best


@dataclass(frozen=True)
class DirectionProbe:
    """Directional local-minimum diagnostics at a measure."""

    min_gap: float               # min_t g(t) - g(0) over the probe grid
    local_min_ok: bool
    alpha_residual: float        # min_a [I(mu^{n-1},nu) - a I(nu) - (1-a) I(mu)]
    mixture: MixturePolynomial = field(repr=False)


def local_min_probe(kernel: Kernel, mu: DiscreteMeasure, directions,
                    t_max: float = 1.0, grid: int = 201,
                    alpha_grid: int = 99) -> list[DirectionProbe]:
    """Probe whether mu is a directional local minimizer of the energy.

    For each direction nu the exact mixture polynomial is evaluated on
    [0, t_max]; the probe also reports the best mean-bound residual over
    an interior alpha grid (nonpositive residual certifies the averaged
    upper bound on the mixed energy).
    """
    if not mu.is_probability:
        raise ValueError("the base measure must be a probability measure")
    ts = np.linspace(0.0, min(max(t_max, 0.0), 1.0), grid)
    alphas = np.linspace(0.0, 1.0, alpha_grid + 2)[1:-1]
    out = []
    for nu in directions:
        if not nu.is_probability:
            raise ValueError("probe directions must be probability measures")
        g = mixture_polynomial(kernel, mu, nu)
        gap = float(np.min(g(ts) - g(0.0)))
        c = g.coefficients
        residuals = c[1] - alphas * c[-1] - (1 - alphas) * c[0]
        out.append(DirectionProbe(
            min_gap=gap,
            local_min_ok=gap >= -1e-10,
            alpha_residual=float(np.min(residuals)),
            mixture=g,
        ))
    return out
