from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlike.algebra import (
    MetricAlgebra,
    abelian_factor,
    abelian_factor_dim,
    bracket,
    check_commutator_exact,
    commutator_margin,
    j_of,
    standard_from_subspace,
    transform,
)
from hlike.fixtures import f32, fixture, gornet_mast, h3, h5, quaternionic, rotation, star
from hlike.linalg import random_orthogonal


def test_bracket_defines_j():
    alg = f32()
    e = np.eye(3)
    # [E1, E2] = F1, [E2, E3] = F2, [E1, E3] = F3
    assert np.allclose(bracket(alg, e[0], e[1]), [1, 0, 0])
    assert np.allclose(bracket(alg, e[1], e[2]), [0, 1, 0])
    assert np.allclose(bracket(alg, e[0], e[2]), [0, 0, 1])


@given(st.integers(min_value=0, max_value=2**31))
@settings(max_examples=30, deadline=None)
def test_j_bracket_duality(seed):
    rng = np.random.default_rng(seed)
    alg = gornet_mast(1, 2, int(rng.integers(4)))
    X, Y, Z = rng.standard_normal(4), rng.standard_normal(4), rng.standard_normal(2)
    assert abs(j_of(alg, Z) @ X @ Y - Z @ bracket(alg, X, Y)) <= 1e-10
    assert np.allclose(bracket(alg, X, Y), -bracket(alg, Y, X))


def test_fixture_shapes_and_exactness():
    for alg, shape in [(h3(), (1, 2)), (h5(1, 2), (1, 4)), (gornet_mast(), (2, 4)), (f32(), (3, 3)),
                       (star(4), (4, 5)), (quaternionic(), (3, 4))]:
        assert (alg.p, alg.q) == shape
        assert alg.is_exact and alg.exact.orthonormal


def test_fixture_lookup():
    assert fixture("star", m=3).p == 3
    with pytest.raises(KeyError):
        fixture("nope")
    with pytest.raises(ValueError):
        h5(0, 0)
    with pytest.raises(ValueError):
        gornet_mast(1, 2, 7)


def test_quaternionic_satisfies_clifford_relations():
    J = quaternionic().j_basis
    for i in range(3):
        for k in range(3):
            anti = J[i] @ J[k] + J[k] @ J[i]
            assert np.allclose(anti, -2 * np.eye(4) if i == k else 0)


def test_from_matrices_detects_exact_and_float():
    assert MetricAlgebra.from_matrices([rotation(1)]).is_exact
    assert not MetricAlgebra.from_matrices([[[0.0, -0.5], [0.5, 0.0]]]).is_exact
    with pytest.raises(ValueError):
        MetricAlgebra.from_matrices([[[0, 1], [1, 0]]])
    with pytest.raises(ValueError):
        MetricAlgebra.from_matrices([], q=None)


def test_abelian_algebra():
    a = MetricAlgebra.abelian(3)
    assert (a.p, a.q) == (0, 3)
    assert abelian_factor_dim(a) == 3
    assert check_commutator_exact(a)
    assert abelian_factor(a).dim == 3


def test_standard_from_subspace_exact_uses_frobenius_gram():
    A = h5(1, 3).exact.generators[0]
    alg = standard_from_subspace([A])
    assert alg.exact.gram[0, 0] == 20
    assert np.allclose(alg.j_basis[0], h5(1, 3).j_basis[0] / np.sqrt(20))


def test_standard_from_subspace_float_is_orthonormal():
    rng = np.random.default_rng(0)
    mats = []
    for _ in range(3):
        M = rng.standard_normal((4, 4))
        mats.append(M - M.T)
    alg = standard_from_subspace(mats)
    F = alg.j_basis.reshape(3, -1)
    assert np.allclose(F @ F.T, np.eye(3), atol=1e-12)
    with pytest.raises(ValueError):
        standard_from_subspace([mats[0], 2 * mats[0]])
    with pytest.raises(ValueError):
        standard_from_subspace([rotation(1), rotation(2)])


def test_commutator_and_abelian_factor():
    assert abelian_factor_dim(h5(1, 0)) == 2
    assert abelian_factor_dim(f32()) == 0
    assert abelian_factor_dim(star(3)) == 0
    dependent = MetricAlgebra.from_matrices([rotation(1), rotation(2)])
    assert not check_commutator_exact(dependent)
    assert commutator_margin(dependent) < 1e-12
    assert check_commutator_exact(f32())


def test_transform_exact_and_float():
    P = np.array([[0, 1], [1, 0]], dtype=object)
    t = transform(h3(), P=P, scale=Fraction(1, 2))
    assert t.is_exact
    assert t.exact.generators[0][0, 1] == Fraction(1, 2)
    rng = np.random.default_rng(3)
    Q, B = random_orthogonal(3, rng), random_orthogonal(3, rng)
    u = transform(f32(), Q, B, 2.0)
    Z = rng.standard_normal(3)
    assert np.allclose(j_of(u, B @ Z), 2.0 * Q @ j_of(f32(), Z) @ Q.T)


def test_non_orthonormal_exact_gram():
    # generators M and 2M with Gram [[2]] and [[8]] give the same orthonormal J
    M = rotation(1)
    a = MetricAlgebra.from_exact([M], [[2]])
    b = MetricAlgebra.from_exact([2 * M], [[8]])
    assert np.allclose(a.j_basis, b.j_basis)
    assert np.allclose(a.j_basis[0], np.array([[0, -1], [1, 0]]) / np.sqrt(2))
