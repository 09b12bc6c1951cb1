"""Sphere geometry, atomic measures and CSV interchange."""
import numpy as np
import pytest

from multipot import (
    DegenerateRetraction,
    DiscreteMeasure,
    PointConfiguration,
    basis_vector,
    combine,
    gram,
    mix,
    project_tangent,
    random_rotation,
    read_measure_csv,
    read_points_csv,
    retract,
    sample_sphere,
    unit_vector,
    write_measure_csv,
    write_points_csv,
)


def test_sample_sphere_unit_norms():
    config = sample_sphere(3, 1000, 7)
    norms = np.linalg.norm(config.points, axis=1)
    assert np.max(np.abs(norms - 1.0)) <= 1e-12


def test_sample_sphere_mean_vector_clt_bound():
    m = 100_000
    config = sample_sphere(3, m, 1)
    assert np.linalg.norm(config.points.mean(axis=0)) <= 4.0 / np.sqrt(m)


def test_sample_sphere_mean_vector_bound_across_seeds():
    # the 4/sqrt(M) band is a ~4 sigma bound; it should hold seed after seed
    m = 20_000
    for seed in range(10):
        config = sample_sphere(3, m, seed)
        assert np.linalg.norm(config.points.mean(axis=0)) <= 4.0 / np.sqrt(m)


def test_sample_sphere_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sample_sphere(1, 5, 0)
    with pytest.raises(ValueError):
        sample_sphere(3, 0, 0)


def test_sample_sphere_reproducible_bitwise():
    a = sample_sphere(4, 200, 42).points
    b = sample_sphere(4, 200, 42).points
    assert np.array_equal(a, b)
    c = sample_sphere(4, 200, 43).points
    assert not np.array_equal(a, c)


def test_gram_orthonormal_is_identity():
    pts = np.eye(3)
    assert np.allclose(gram(PointConfiguration(pts)), np.eye(3), atol=1e-15)


def test_gram_repeated_point_is_ones():
    x = sample_sphere(4, 1, 3).points[0]
    config = PointConfiguration(np.stack([x, x]))
    assert np.allclose(gram(config), np.ones((2, 2)), atol=1e-15)


def test_gram_positive_semidefinite():
    config = sample_sphere(3, 25, 9)
    eigs = np.linalg.eigvalsh(gram(config))
    assert eigs[0] >= -1e-10


def test_gram_rotation_invariant():
    config = sample_sphere(4, 15, 11)
    rot = random_rotation(4, 5)
    rotated = PointConfiguration(config.points @ rot.T)
    assert np.max(np.abs(gram(config) - gram(rotated))) <= 1e-10


def test_project_tangent():
    e1, e2 = basis_vector(0, 3), basis_vector(1, 3)
    assert np.allclose(project_tangent(e1, e1), 0.0)
    assert np.allclose(project_tangent(e1, e2), e2)
    rng = np.random.default_rng(2)
    x = sample_sphere(5, 1, 8).points[0]
    g = rng.standard_normal(5)
    assert abs(np.dot(project_tangent(x, g), x)) <= 1e-12
    with pytest.raises(ValueError):
        project_tangent(e1, np.zeros(4))


def test_retract():
    e1, e2 = basis_vector(0, 3), basis_vector(1, 3)
    assert np.allclose(retract(e1, np.zeros(3)), e1)
    expected = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
    assert np.allclose(retract(e1, e2), expected)
    with pytest.raises(DegenerateRetraction):
        retract(e1, -e1)


def test_unit_vector_validation():
    with pytest.raises(ValueError):
        unit_vector([1.0, 1.0])
    with pytest.raises(ValueError):
        unit_vector([1.0])
    v = unit_vector([0.0, 1.0])
    assert v.shape == (2,)


def test_measure_flags():
    e1, e2 = basis_vector(0, 3), basis_vector(1, 3)
    prob = DiscreteMeasure(np.stack([e1, e2]), np.array([0.25, 0.75]))
    assert prob.is_probability and not prob.is_balanced
    bal = combine(DiscreteMeasure.dirac(e1), DiscreteMeasure.dirac(e2), 1.0, -1.0)
    assert bal.is_balanced and not bal.is_probability
    assert bal.total_mass == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        DiscreteMeasure(np.array([[2.0, 0.0, 0.0]]), np.array([1.0]))


def test_mix_endpoints_and_mass():
    e1, e2 = basis_vector(0, 3), basis_vector(1, 3)
    mu = DiscreteMeasure.dirac(e1)
    nu = DiscreteMeasure.dirac(e2)
    at_zero = mix(mu, nu, 0.0)
    assert at_zero.weights[0] == 1.0 and at_zero.weights[1] == 0.0
    half = mix(mu, nu, 0.5)
    assert np.allclose(half.weights, [0.5, 0.5])
    signed = DiscreteMeasure(np.stack([e1, e2]), np.array([2.0, -0.5]))
    t = 0.3
    mixed = mix(signed, nu, t)
    assert mixed.total_mass == pytest.approx((1 - t) * signed.total_mass + t * 1.0)
    with pytest.raises(ValueError):
        mix(mu, nu, 1.5)


def test_mix_dimension_mismatch():
    with pytest.raises(ValueError):
        mix(DiscreteMeasure.dirac(basis_vector(0, 3)),
            DiscreteMeasure.dirac(basis_vector(0, 4)), 0.5)


def test_combine():
    e1, e2, e3 = (basis_vector(i, 3) for i in range(3))
    both = combine(DiscreteMeasure.dirac(e2), DiscreteMeasure.dirac(e3), 1.0, 1.0)
    assert both.total_mass == pytest.approx(2.0)
    mu = DiscreteMeasure(np.stack([e1, e2]), np.array([0.4, 0.6]))
    cancel = combine(mu, mu, 1.0, -1.0)
    assert cancel.is_balanced
    with pytest.raises(ValueError):
        combine(mu, DiscreteMeasure.dirac(basis_vector(0, 4)), 1.0, 1.0)


def test_csv_roundtrip(tmp_path):
    measure = DiscreteMeasure(sample_sphere(3, 6, 1).points,
                              np.array([0.5, -0.25, 0.1, 0.2, 0.05, 0.4]))
    path = tmp_path / "m.csv"
    write_measure_csv(path, measure)
    back = read_measure_csv(path)
    assert np.array_equal(back.atoms, measure.atoms)
    assert np.array_equal(back.weights, measure.weights)

    config = sample_sphere(4, 5, 2)
    ppath = tmp_path / "p.csv"
    write_points_csv(ppath, config)
    assert np.array_equal(read_points_csv(ppath).points, config.points)


def test_csv_weight_column_optional(tmp_path):
    path = tmp_path / "nw.csv"
    path.write_text("x1,x2\n1.0,0.0\n0.0,1.0\n")
    measure = read_measure_csv(path)
    assert np.allclose(measure.weights, [0.5, 0.5])
    assert measure.is_probability


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1.0,0.0\n")
    with pytest.raises(ValueError):
        read_measure_csv(path)


def test_configuration_immutable():
    config = sample_sphere(3, 4, 0)
    with pytest.raises(ValueError):
        config.points[0, 0] = 2.0
