from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlike.algebra import MetricAlgebra, j_of
from hlike.construct import (
    HypothesisError,
    Kind,
    central_sum,
    direct_sum,
    submersion_quotient,
    subspace_sum,
    tensor_product,
)
from hlike.fixtures import f32, gornet_mast, h3, h5, rotation, star
from hlike.linalg import Subspace, rank, skew_spectrum
from hlike.multiset import AdmissibleMultiset
from hlike.verify import Verdict, classify


def S(text):
    return AdmissibleMultiset.parse(text)


def assert_prediction_measured(alg):
    report = classify(alg)
    predicted = alg.record.predicted_spectrum
    assert predicted is not None
    assert report.spectrum.equals_approx(predicted, 1e-9)
    return report


def test_direct_sum_with_abelian():
    alg = direct_sum(h3(), MetricAlgebra.abelian(2))
    assert (alg.p, alg.q) == (1, 4)
    assert alg.record.kind is Kind.DIRECT_SUM
    r = assert_prediction_measured(alg)
    assert r.spectrum == S("1:1,0:2")
    assert r.verdict is Verdict.ABELIAN_FACTOR


def test_direct_sum_of_nonabelian_is_not_constant():
    alg = direct_sum(h3(), h3())
    assert alg.record.predicted_spectrum is None
    assert classify(alg).verdict is Verdict.NOT_CONSTANT


def test_direct_sum_with_zero_algebra_is_unchanged():
    alg = direct_sum(f32(), MetricAlgebra.abelian(0))
    assert np.array_equal(alg.j_basis, f32().j_basis)


@given(st.integers(min_value=0, max_value=2**31))
@settings(max_examples=20, deadline=None)
def test_direct_sum_rank_is_additive(seed):
    rng = np.random.default_rng(seed)
    a1, a2 = gornet_mast(1, 2, 0), f32()
    alg = direct_sum(a1, a2)
    Z1, Z2 = rng.standard_normal(2), rng.standard_normal(3)
    assert rank(j_of(alg, np.concatenate([Z1, Z2]))) == rank(j_of(a1, Z1)) + rank(j_of(a2, Z2))


def test_direct_sum_float_path():
    floaty = MetricAlgebra(h3().j_basis * 0.5, 2)
    alg = direct_sum(floaty, MetricAlgebra.abelian(1))
    assert not alg.is_exact
    assert alg.record.predicted_spectrum.equals_approx(S("0.5:1,0:1"))


def test_tensor_product_gives_h5():
    alg = tensor_product(h3(), [[1, 0], [0, 2]])
    assert alg.is_exact
    r = assert_prediction_measured(alg)
    assert r.spectrum == S("1:1,2:1")
    # isometric to h5(1, 2): same J up to a permutation of v
    P = np.eye(4)[[0, 2, 1, 3]]
    assert np.allclose(P @ alg.j_basis[0] @ P.T, h5(1, 2).j_basis[0])


def test_tensor_product_with_indefinite_matrix():
    r = assert_prediction_measured(tensor_product(h3(), [[1, 0], [0, -1]]))
    assert r.spectrum == S("1:2")
    assert r.verdict is Verdict.HTYPE


def test_tensor_with_identity_multiplies_multiplicities():
    r = assert_prediction_measured(tensor_product(f32(), np.eye(3, dtype=int)))
    assert r.spectrum == S("1:3,0:3")


def test_tensor_product_irrational_and_float_eigenvalues():
    assert_prediction_measured(tensor_product(h3(), [[1, 1], [1, 2]]))
    assert_prediction_measured(tensor_product(gornet_mast(), [[0.3, 0.1], [0.1, -0.7]]))


def test_tensor_product_errors():
    with pytest.raises(ValueError):
        tensor_product(h3(), [[1]])
    with pytest.raises(ValueError):
        tensor_product(h3(), [[1, 2], [0, 1]])
    with pytest.raises(ValueError):
        tensor_product(h3(), [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        tensor_product(h3(), [[1.0, 1.0], [1.0, 1.0]])


def test_central_sum_of_heisenbergs_is_htype():
    r = assert_prediction_measured(central_sum(h3(), h3()))
    assert r.verdict is Verdict.HTYPE
    assert r.spectrum == S("1:2")


def test_central_sum_f32():
    alg = central_sum(f32(), f32())
    assert (alg.p, alg.q) == (3, 6)
    r = assert_prediction_measured(alg)
    assert r.verdict is Verdict.HLIKE
    assert r.spectrum == S("1:2,0:2")


def test_central_sum_independent_of_isometry():
    perm = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    a = classify(central_sum(f32(), f32()))
    b = classify(central_sum(f32(), f32(), perm))
    c = classify(central_sum(f32(), f32(), np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)))[0]))
    assert a.verdict is b.verdict is c.verdict
    assert a.spectrum == b.spectrum
    assert c.spectrum.equals_approx(a.spectrum, 1e-9)


def test_tensor_identity_and_central_sum_agree():
    a = classify(tensor_product(f32(), np.eye(2, dtype=int)))
    b = classify(central_sum(f32(), f32()))
    assert (a.verdict, a.spectrum, a.j_rank) == (b.verdict, b.spectrum, b.j_rank)


def test_central_sum_errors():
    with pytest.raises(ValueError):
        central_sum(h3(), f32())
    with pytest.raises(ValueError):
        central_sum(h3(), h3(), [[2]])
    with pytest.raises(ValueError):
        central_sum(h5(1, 0), h3())


def test_submersion_examples():
    q = submersion_quotient(f32(), [[0, 0, 1]])
    assert (q.p, q.q) == (2, 3) and q.is_exact
    assert assert_prediction_measured(q).spectrum == S("1:1,0:1")
    g = submersion_quotient(gornet_mast(1, 2, 0), [[0, 1]])
    assert assert_prediction_measured(g).spectrum == S("1:1,2:1")
    same = submersion_quotient(f32(), np.zeros((0, 3), dtype=object))
    assert np.allclose(same.j_basis, f32().j_basis)


def test_submersion_oblique_kernel_and_float_path():
    q = submersion_quotient(f32(), [[1, 1, 0]])
    assert q.is_exact and not q.exact.orthonormal
    assert assert_prediction_measured(q).verdict is Verdict.HLIKE
    K = Subspace.span([[1.0, 2.0, 0.5]])
    r = submersion_quotient(star(3), K)
    assert not r.is_exact
    assert assert_prediction_measured(r).spectrum.equals_approx(S("1:1,0:2"))


def test_submersion_errors():
    with pytest.raises(ValueError):
        submersion_quotient(h3(), [[1]])
    with pytest.raises(ValueError):
        submersion_quotient(f32(), [[1, 0]])


def test_subspace_sum_example_gives_h5():
    alg = subspace_sum([[rotation(1)], [rotation(2)]], [S("1:1"), S("2:1")])
    r = assert_prediction_measured(alg)
    assert r.spectrum == S("1:1,2:1")
    assert np.allclose(alg.j_basis[0], h5(1, 2).j_basis[0])


def test_subspace_sum_f32_blocks():
    F = f32().exact.generators
    alg = subspace_sum([[F[0], F[1]], [F[1], F[2]]], [S("1:1,0:1"), S("1:1,0:1")])
    assert (alg.p, alg.q) == (2, 6)
    assert assert_prediction_measured(alg).spectrum == S("1:2,0:2")


def test_subspace_sum_float_blocks():
    F = f32().j_basis * 1.5
    alg = subspace_sum([[F[0], F[1]], [F[1], F[2]]], [S("1.5:1,0:1"), S("1.5:1,0:1")])
    assert not alg.is_exact
    assert assert_prediction_measured(alg).spectrum.equals_approx(S("1.5:2,0:2"))


def test_subspace_sum_hypotheses_are_numbered():
    F = f32().exact.generators
    s = S("1:1,0:1")
    with pytest.raises(HypothesisError) as e:
        subspace_sum([[np.zeros((1, 1), dtype=object)]], [S("0:1")])
    assert e.value.number == 1
    with pytest.raises(HypothesisError) as e:
        subspace_sum([[F[0], 2 * F[1]]], [s])
    assert e.value.number == 2 and e.value.indices == ((0, 1),)
    A = np.zeros((4, 4), dtype=object)
    A.fill(Fraction(0))
    B = A.copy()
    A[:2, :2] = rotation(1)
    B[2:, 2:] = rotation(1)
    with pytest.raises(HypothesisError) as e:
        subspace_sum([[A, B]], [S("1:1,0:2")])
    assert e.value.number == 3
    with pytest.raises(HypothesisError) as e:
        subspace_sum([[F[0], -F[0]]], [s])
    assert e.value.number == 4


def test_record_json():
    doc = tensor_product(h3(), [[1, 0], [0, 2]]).record.to_json()
    assert doc["kind"] == "TensorProduct"
    assert doc["predicted_spectrum"] == S("1:1,2:1").to_json()
    assert direct_sum(h3(), h3()).record.to_json()["predicted_spectrum"] == "none"
