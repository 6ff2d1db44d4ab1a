import math

import numpy as np
import pytest
from hypothesis import given, settings

from qcorr.correlations import (
    JointDistribution,
    SettingPair,
    anti_corr_prob,
    bloch_decomposition,
    expectation,
    joint_distribution,
    same_prob,
)
from qcorr.qlinalg import SINGLET, BlochObservable, DensityMatrix, DimensionError, InvariantError
from qcorr.werner import werner_state

from conftest import random_state_and_settings, seeds

PAULI3 = SettingPair.same_axes("xyz")


def explicit_werner(p):
    singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
    return p * np.outer(singlet, singlet) + (1 - p) * np.eye(4) / 4


def test_singlet_z_anticorrelated():
    dist = joint_distribution(SINGLET.density(), SettingPair.same_axes("z"))
    np.testing.assert_allclose(dist.table[0, 0], [[0, 0.5], [0.5, 0]], atol=1e-12)


def test_maximally_mixed_uniform(rng):
    from conftest import random_settings

    dist = joint_distribution(DensityMatrix.maximally_mixed(), random_settings(rng, 3))
    np.testing.assert_allclose(dist.table, 0.25, atol=1e-12)


def test_werner_x_x_against_explicit_trace():
    # oracle: Tr[(P_a (x) P_b) rho] written out with hand-built 4x4 matrices
    plus = np.array([[0.5, 0.5], [0.5, 0.5]])
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
    rho = explicit_werner(0.5)
    expected = np.array([[np.trace(np.kron(pa, pb) @ rho).real for pb in (plus, minus)] for pa in (plus, minus)])
    assert expected[0, 1] == pytest.approx(0.375)
    assert expected[1, 0] == pytest.approx(0.375)
    dist = joint_distribution(werner_state(0.5), SettingPair.same_axes("x"))
    np.testing.assert_allclose(dist.table[0, 0], expected, atol=1e-12)


def test_imaginary_trace_rejected():
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 2] = 0.1  # not Hermitian; y-basis traces pick up an imaginary part
    with pytest.raises(InvariantError):
        joint_distribution(bad, SettingPair.same_axes("y"))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        joint_distribution(DensityMatrix.maximally_mixed(2), PAULI3)


class TestExpectation:
    def test_singlet_same_axis(self):
        dist = joint_distribution(SINGLET.density(), PAULI3)
        for i in range(3):
            assert expectation(dist, i, i) == pytest.approx(-1.0, abs=1e-9)

    def test_mixed(self):
        dist = joint_distribution(DensityMatrix.maximally_mixed(), PAULI3)
        assert expectation(dist, 0, 2) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("p", [0.0, 0.3, 0.75, 1.0])
    def test_werner_linear(self, p):
        dist = joint_distribution(werner_state(p), PAULI3)
        oracle = sum((-1) ** (a + b) * dist.table[1, 1, a, b] for a in (0, 1) for b in (0, 1))
        assert oracle == pytest.approx(-p, abs=1e-12)
        assert expectation(dist, 1, 1) == pytest.approx(-p, abs=1e-12)

    def test_index_range(self):
        dist = joint_distribution(SINGLET.density(), PAULI3)
        with pytest.raises(IndexError):
            expectation(dist, 3, 0)
        with pytest.raises(IndexError):
            anti_corr_prob(dist, -1)


class TestAntiCorrelation:
    def test_singlet(self):
        dist = joint_distribution(SINGLET.density(), SettingPair.same_axes("z"))
        assert anti_corr_prob(dist, 0) == pytest.approx(1.0)

    def test_mixed(self):
        dist = joint_distribution(DensityMatrix.maximally_mixed(), SettingPair.same_axes("z"))
        assert anti_corr_prob(dist, 0) == pytest.approx(0.5)

    def test_werner_third(self):
        dist = joint_distribution(werner_state(1 / 3), PAULI3)
        t = dist.table[2, 2]
        assert t[0, 1] + t[1, 0] == pytest.approx(2 / 3, abs=1e-12)
        assert anti_corr_prob(dist, 2) == pytest.approx(2 / 3, abs=1e-12)

    @given(seeds)
    @settings(max_examples=50)
    def test_identities(self, seed):
        state, pair = random_state_and_settings(seed)
        dist = joint_distribution(state, pair)
        for i in range(3):
            pd = anti_corr_prob(dist, i)
            assert pd == pytest.approx((1 - expectation(dist, i, i)) / 2, abs=1e-9)
            assert pd + same_prob(dist, i) == pytest.approx(1.0, abs=1e-9)


@given(seeds)
@settings(max_examples=100)
def test_distribution_invariants(seed):
    state, pair = random_state_and_settings(seed)
    dist = joint_distribution(state, pair)
    assert dist.table.min() >= 0 and dist.table.max() <= 1
    np.testing.assert_allclose(dist.table.sum(axis=(2, 3)), 1.0, atol=1e-9)
    assert dist.signalling_gap() <= 1e-9
    for i in range(3):
        for j in range(3):
            assert -1 <= expectation(dist, i, j) <= 1


def test_bloch_decomposition_reproduces_table(rng):
    from conftest import random_settings

    state, pair = random_state_and_settings(7)
    m_a, m_b, t = bloch_decomposition(state)
    dist = joint_distribution(state, pair)
    x, y = pair.alice_vectors(), pair.bob_vectors()
    for i, j, a, b in np.ndindex(3, 3, 2, 2):
        sa, sb = (-1) ** a, (-1) ** b
        p = (1 + sa * m_a @ x[i] + sb * m_b @ y[j] + sa * sb * x[i] @ t @ y[j]) / 4
        assert p == pytest.approx(dist.table[i, j, a, b], abs=1e-12)


class TestJointDistributionType:
    def test_rejects_unnormalized(self):
        with pytest.raises(InvariantError):
            JointDistribution(np.full((1, 1, 2, 2), 0.3))

    def test_rejects_bad_shape(self):
        with pytest.raises(DimensionError):
            JointDistribution(np.full((2, 1, 2, 2), 0.25))

    def test_clamps_rounding_noise(self):
        t = np.array([[[[0.5, -1e-13], [0.0, 0.5 + 1e-13]]]])
        assert JointDistribution(t).table.min() == 0.0

    def test_rejects_real_negative(self):
        t = np.array([[[[0.6, -0.1], [0.0, 0.5]]]])
        with pytest.raises(InvariantError):
            JointDistribution(t)

    def test_json_round_trip(self, schema_validator):
        dist = joint_distribution(werner_state(0.4), PAULI3)
        data = dist.to_dict()
        schema_validator("joint_distribution", data)
        again = JointDistribution.from_dict(data)
        np.testing.assert_array_equal(again.table, dist.table)

    def test_setting_pair_lengths(self):
        with pytest.raises(ValueError):
            SettingPair((BlochObservable.axis("x"),), ())
