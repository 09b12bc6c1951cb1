"""Positive-definiteness certification, convexity probes, constancy checks."""
import numpy as np
import pytest

from multipot import (
    DiscreteMeasure,
    area2,
    basis_vector,
    convexity_probe,
    inequality_suite,
    inner,
    frame2,
    mixture_polynomial,
    mutual_energy,
    npd_test,
    neg_area2,
    neg_vol2,
    pd_test_2input,
    pin,
    potential_constancy_check,
    prod_lift,
    quad_a,
    riesz,
    s011,
    s100,
    sample_sphere,
    shift_equivalence_battery,
    sum_lift,
    uniform_surrogate,
    uvt,
)
from multipot.certify import _balanced_basis, _kernel_matrix, _matrix_min_eig

E1, E2, E3 = (basis_vector(i, 3) for i in range(3))


def _random_probability(n_atoms, d, seed):
    rng = np.random.default_rng(seed)
    atoms = rng.standard_normal((n_atoms, d))
    atoms /= np.linalg.norm(atoms, axis=1, keepdims=True)
    w = rng.random(n_atoms) + 0.05
    return DiscreteMeasure(atoms, w / w.sum())


def _check_witness(kernel, verdict, conditional):
    w = verdict.witness
    assert w is not None and w.energy < 0
    pinned = pin(kernel, np.stack(w.pins)) if w.pins else kernel
    recomputed = mutual_energy(pinned, [w.measure, w.measure]).value
    assert recomputed == pytest.approx(w.energy, abs=1e-12)
    if conditional:
        assert abs(w.measure.total_mass) <= 1e-12


# --- two-input tests ---------------------------------------------------------------


def test_inner_product_kernel_passes_plain():
    verdict = pd_test_2input(inner(), 3, trials=10, set_size=20, seed=1)
    assert verdict.passed
    assert verdict.min_eigenvalue_seen >= -1e-10
    assert verdict.trials_run == 10


def test_negative_distance_fails_plain_with_valid_witness():
    kernel = -riesz(1.0)
    verdict = pd_test_2input(kernel, 3, trials=5, set_size=8, seed=2,
                             include_points=np.stack([E1, E2]))
    assert verdict.outcome == "fail"
    _check_witness(kernel, verdict, conditional=False)


def test_pinned_neg_vol2_fails_plain_on_basis_pair():
    # the 2x2 matrix over {e2, e3} is [[0, -1], [-1, 0]]
    kernel = pin(neg_vol2(), E1)
    mat = _kernel_matrix(kernel, np.stack([E2, E3]))
    assert np.allclose(mat, [[0.0, -1.0], [-1.0, 0.0]], atol=1e-14)
    verdict = pd_test_2input(kernel, 3, trials=3, set_size=10, seed=3,
                             include_points=np.stack([E2, E3]))
    assert verdict.outcome == "fail"
    _check_witness(kernel, verdict, conditional=False)


def test_pd_test_size_validation():
    with pytest.raises(ValueError):
        pd_test_2input(inner(), 3, trials=0)
    with pytest.raises(ValueError):
        pd_test_2input(inner(), 3, set_size=1)
    with pytest.raises(ValueError):
        pd_test_2input(uvt(), 3)


def test_conditional_restriction_never_below_plain_minimum():
    # Rayleigh restriction to the sum-zero subspace cannot lower the minimum
    rng = np.random.default_rng(4)
    for kernel in [pin(s100(), E1), inner(), -riesz(1.0)]:
        for _ in range(5):
            pts = rng.standard_normal((12, 3))
            pts /= np.linalg.norm(pts, axis=1, keepdims=True)
            mat = _kernel_matrix(kernel, pts)
            plain, _ = _matrix_min_eig(mat, conditional=False)
            restricted, _ = _matrix_min_eig(mat, conditional=True)
            assert restricted >= plain - 1e-12


def test_balanced_basis_properties():
    basis = _balanced_basis(7)
    assert np.allclose(basis.T @ basis, np.eye(6), atol=1e-12)
    assert np.max(np.abs(basis.sum(axis=0))) <= 1e-12


# --- n-input tests ---------------------------------------------------------------------


@pytest.mark.parametrize("kernel_factory,conditional", [
    (uvt, False),
    (lambda: quad_a(-1.0, shift=True), False),
    (lambda: quad_a(0.0, shift=True), False),
    (lambda: quad_a(0.5, shift=True), False),
    (lambda: quad_a(0.9, shift=True), False),
    (lambda: sum_lift(inner(), 3), True),
    (lambda: prod_lift(frame2(), 3), False),
])
def test_npd_positive_families_pass(kernel_factory, conditional):
    for d in (3, 4):
        verdict = npd_test(kernel_factory(), d, conditional=conditional,
                           pin_trials=3, inner_trials=3, set_size=20, seed=5)
        assert verdict.passed
        assert verdict.min_eigenvalue_seen >= -1e-9


@pytest.mark.parametrize("kernel_factory", [neg_vol2, neg_area2, s011, s100])
def test_npd_counterexamples_fail_conditionally(kernel_factory):
    kernel = kernel_factory()
    verdict = npd_test(kernel, 3, conditional=True, pin_trials=3, inner_trials=3,
                       set_size=16, seed=6)
    assert verdict.outcome == "fail"
    _check_witness(kernel, verdict, conditional=True)


def test_sum_lift_of_inner_is_not_plainly_pd():
    # pinning u+v+t at e1 and testing against -e1 gives energy -1
    verdict = npd_test(sum_lift(inner(), 3), 3, conditional=False,
                       pin_trials=3, inner_trials=3, set_size=16, seed=7)
    assert verdict.outcome == "fail"


def test_npd_requires_three_inputs():
    with pytest.raises(ValueError):
        npd_test(inner(), 3)


def test_potential_of_pd_kernel_inherits_positive_definiteness():
    # integrating one slot of a positive definite three-input kernel
    # against any probability measure leaves a positive definite
    # two-input kernel
    from multipot import PotentialKernel
    for seed in (30, 31):
        mu = _random_probability(4, 3, seed)
        inherited = PotentialKernel(uvt(), [mu])
        verdict = pd_test_2input(inherited, 3, trials=6, set_size=12, seed=seed)
        assert verdict.passed
        assert verdict.min_eigenvalue_seen >= -1e-10


# --- shift lemma -------------------------------------------------------------------------


def test_shift_battery_agreement():
    battery = [pin(neg_vol2(), E1), pin(neg_area2(), E1), pin(s011(), E1),
               pin(uvt(), E1), inner(), frame2(), -frame2(), -riesz(2.0), -riesz(1.0)]
    for i, kernel in enumerate(battery):
        result = shift_equivalence_battery(kernel, 3, trials=8, set_size=10,
                                           seed=100 + i, x0=E1)
        assert result["disagreements"] == 0, kernel.name


# --- convexity ---------------------------------------------------------------------------


def test_convexity_probe_flat_when_nu_equals_mu():
    mu = _random_probability(4, 3, 8)
    report = convexity_probe(area2(), mu, mu)
    assert report.g_prime_0 == pytest.approx(0.0, abs=1e-12)
    assert report.g_double_prime_0 == pytest.approx(0.0, abs=1e-12)
    assert report.convex_on_unit_interval
    assert report.violation_t is None


def test_convexity_probe_requires_probability_measures():
    mu = _random_probability(3, 3, 9)
    signed = DiscreteMeasure(mu.atoms, mu.weights - 0.2)
    with pytest.raises(ValueError):
        convexity_probe(area2(), mu, signed)


def test_derivative_identities_random_setups():
    rng = np.random.default_rng(10)
    banks = {
        3: [uvt(), area2(), s100(), quad_a(0.7, shift=True)],
        4: [sum_lift(inner(), 4), sum_lift(s011(), 4)],
    }
    for n, bank in banks.items():
        for i in range(8):
            kernel = bank[i % len(bank)]
            mu = _random_probability(3, 3, int(rng.integers(1 << 30)))
            nu = _random_probability(4, 3, int(rng.integers(1 << 30)))
            rep = convexity_probe(kernel, mu, nu, grid=3)
            assert rep.h_prime_0 == pytest.approx((2.0 / n) * rep.g_prime_0,
                                                  rel=1e-8, abs=1e-10)
            assert rep.h_double_prime_0 == pytest.approx(
                (2.0 / (n * (n - 1))) * rep.g_double_prime_0, rel=1e-8, abs=1e-10)


def test_s100_not_convex_at_uniform_surrogate():
    sigma = uniform_surrogate(3, 4000, 11)
    delta = DiscreteMeasure.dirac(E1)
    report = convexity_probe(s100(), sigma, delta)
    assert not report.convex_on_unit_interval
    assert report.violation_t is not None
    halfway = report.mixture(0.5) - 0.5 * (report.mixture(0.0) + report.mixture(1.0))
    assert halfway == pytest.approx(0.25, abs=0.05)


def test_s011_convex_at_uniform_surrogate_for_small_t():
    sigma = uniform_surrogate(3, 4000, 12)
    for seed in (13, 14):
        nu = _random_probability(3, 3, seed)
        g = mixture_polynomial_chord_gap(sigma, nu)
        assert g <= 5e-3  # within the O(M^-1/2) noise of the surrogate


def mixture_polynomial_chord_gap(sigma, nu):
    g = mixture_polynomial(s011(), sigma, nu)
    ts = np.linspace(0.0, 0.2, 21)
    chord = (1 - ts) * g(0.0) + ts * g(1.0)
    return float(np.max(g(ts) - chord))


def test_two_input_conditional_pd_agrees_with_convexity():
    # for two-input kernels, conditional positive definiteness and convex
    # mixture energies come to the same thing
    battery = [
        (inner(), True),
        (frame2(), True),
        (-frame2(), False),
        (-riesz(1.0), True),
        (riesz(1.0), False),
    ]
    rng = np.random.default_rng(15)
    for kernel, expect_cpd in battery:
        verdict = pd_test_2input(kernel, 3, conditional=True, trials=10,
                                 set_size=12, seed=int(rng.integers(1 << 30)))
        assert verdict.passed == expect_cpd, kernel.name
        convex_all = True
        for _ in range(6):
            mu = _random_probability(3, 3, int(rng.integers(1 << 30)))
            nu = _random_probability(3, 3, int(rng.integers(1 << 30)))
            report = convexity_probe(kernel, mu, nu)
            convex_all = convex_all and report.convex_on_unit_interval
        assert convex_all == expect_cpd, kernel.name


# --- potential constancy -----------------------------------------------------------------


def test_potential_constant_for_uniform_surrogate():
    sigma = uniform_surrogate(3, 6000, 16)
    pts = sample_sphere(3, 30, 17)
    for kernel, target in ((area2(), None), (uvt(), 1.0 / 9.0)):
        report = potential_constancy_check(kernel, sigma, pts)
        assert report.passed
        assert report.stderr_estimate > 0
        if target is not None:
            assert report.mean == pytest.approx(target, abs=0.02)


def test_potential_varies_for_point_mass():
    pts = sample_sphere(3, 30, 18)
    report = potential_constancy_check(uvt(), DiscreteMeasure.dirac(E1), pts)
    assert not report.passed
    assert report.max_deviation > 0.1


def test_potential_degenerate_point_mass_is_exactly_constant():
    # the squared triangle area with two coinciding vertices vanishes, so
    # the pinned potential is identically zero and constancy holds
    pts = sample_sphere(3, 30, 19)
    report = potential_constancy_check(area2(), DiscreteMeasure.dirac(E1), pts)
    assert report.passed
    assert abs(report.mean) <= 1e-14


def test_potential_varies_for_two_atom_measure():
    two = DiscreteMeasure(np.stack([E1, E2]), np.array([0.5, 0.5]))
    pts = sample_sphere(3, 30, 20)
    report = potential_constancy_check(area2(), two, pts)
    assert not report.passed


# --- inequality suite ---------------------------------------------------------------------


def test_inequality_suite_uvt():
    report = inequality_suite(uvt(), 3, trials=200, seed=21)
    assert report.am_worst <= 1e-10
    assert report.gm_worst is not None and report.gm_worst <= 1e-10
    assert report.lower_worst <= 1e-10
    assert report.diagonal_worst <= 1e-10
    assert report.gm_trials == 200
    assert report.am_violations == 0


def test_inequality_suite_quad_a_boundary():
    report = inequality_suite(quad_a(1.0), 3, trials=200, seed=22)
    assert report.am_worst <= 1e-10
    assert report.diagonal_worst <= 1e-10


def test_inequality_suite_quad_a_shifted_gm():
    report = inequality_suite(quad_a(0.5, shift=True), 3, trials=200, seed=23)
    assert report.gm_worst is not None and report.gm_worst <= 1e-10
    assert report.lower_worst <= 1e-10


def test_inequality_suite_sum_lift_am():
    report = inequality_suite(sum_lift(inner(), 3), 3, trials=200, seed=25)
    assert report.am_worst <= 1e-10
    assert report.diagonal_worst <= 1e-10


def test_inequality_suite_s100_violates_am():
    report = inequality_suite(s100(), 3, trials=200, seed=24)
    assert report.am_violations > 0


def test_inequality_suite_validation():
    with pytest.raises(ValueError):
        inequality_suite(uvt(), 3, trials=0)
