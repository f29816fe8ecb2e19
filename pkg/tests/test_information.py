import numpy as np
import pytest

from chancap.blocks import block_relative_entropy, reduction, scaled_block_state
from chancap.channels import (
    apply,
    basis_povm,
    completely_noisy_channel,
    dual_apply,
    dual_povm,
    identity_channel,
    measurement_channel,
    omega_channel,
    pretty_good_measurement,
    random_channel,
)
from chancap.errors import DimensionMismatchError, InvariantViolation
from chancap.information import (
    Ensemble,
    basis_identity_povm,
    channel_mutual_information,
    classical_joint,
    classical_mutual_information,
    conditional_mutual_information,
    entanglement_assisted_information,
    holevo_information,
    holevo_information_via_blocks,
    input_outcome_block_state,
    joint_block_state,
    measured_input_information,
    measured_input_information_via_blocks,
    mutual_information,
    mutual_information_via_blocks,
    pure_state,
    weighted_dual,
)
from chancap.linalg import relative_entropy, shannon_entropy, tensor
from chancap.rand import random_density_matrix, random_ensemble, random_povm

ZERO = np.diag([1.0, 0.0]).astype(complex)
ONE = np.diag([0.0, 1.0]).astype(complex)
PLUS = 0.5 * np.ones((2, 2), dtype=complex)


def zero_plus_ensemble():
    return Ensemble(np.array([0.5, 0.5]), (ZERO, PLUS))


def random_instance(seed, n_states=None, n_outcomes=None):
    rng = np.random.default_rng(seed)
    ch = random_channel(2, int(rng.integers(1, 5)), seed=seed)
    ens = random_ensemble(2, n_states or int(rng.integers(2, 5)), rng)
    povm = random_povm(2, n_outcomes or int(rng.integers(2, 5)), rng)
    return ch, ens, povm


class TestMutualInformation:
    def test_orthogonal_states_perfectly_distinguishable(self):
        ens = Ensemble(np.array([0.5, 0.5]), (ZERO, ONE))
        assert abs(mutual_information(ens, basis_povm(2)) - 1.0) < 1e-12

    def test_single_element_povm(self):
        ens = zero_plus_ensemble()
        assert mutual_information(ens, basis_identity_povm(2)) == 0.0

    def test_zero_plus_against_z(self):
        # classical oracle on the 2x2 joint table: rows (1,0) and (1/2,1/2)
        table = np.array([[0.5, 0.0], [0.25, 0.25]])
        px, py = table.sum(1), table.sum(0)
        expected = sum(
            table[i, j] * np.log2(table[i, j] / (px[i] * py[j]))
            for i in range(2)
            for j in range(2)
            if table[i, j] > 0
        )
        got = mutual_information(zero_plus_ensemble(), basis_povm(2))
        assert abs(got - expected) < 1e-12
        assert abs(got - 0.311278) < 1e-6

    def test_commuting_case_is_relative_entropy_of_joints(self):
        # diagonal states and basis measurement reduce to the classical identity
        ens = Ensemble(
            np.array([0.4, 0.6]),
            (np.diag([0.8, 0.2]).astype(complex), np.diag([0.3, 0.7]).astype(complex)),
        )
        m = basis_povm(2)
        table = classical_joint(identity_channel(2), ens, m)
        p12 = np.diag(table.ravel())
        p1xp2 = np.diag(np.outer(table.sum(1), table.sum(0)).ravel())
        assert abs(mutual_information(ens, m) - relative_entropy(p12, p1xp2)) < 1e-10


class TestChannelMutualInformation:
    def test_identity_reduces(self):
        ens = zero_plus_ensemble()
        m = basis_povm(2)
        assert abs(channel_mutual_information(identity_channel(2), ens, m) - mutual_information(ens, m)) < 1e-12

    def test_noisy_channel_gives_zero(self):
        ch = completely_noisy_channel(2)
        for seed in range(5):
            _, ens, povm = random_instance(seed)
            assert channel_mutual_information(ch, ens, povm) < 1e-12

    def test_three_route_agreement(self):
        for seed in range(100):
            ch, ens, povm = random_instance(seed)
            via_outputs = channel_mutual_information(ch, ens, povm)
            via_dual = mutual_information(ens, dual_povm(ch, povm))
            via_blocks = mutual_information_via_blocks(ch, ens, povm)
            assert abs(via_outputs - via_dual) < 1e-10
            assert abs(via_outputs - via_blocks) < 1e-10


class TestClassicalJoint:
    def test_orthogonal_identity_diag(self):
        ens = Ensemble(np.array([0.3, 0.7]), (ZERO, ONE))
        table = classical_joint(identity_channel(2), ens, basis_povm(2))
        np.testing.assert_allclose(table, np.diag([0.3, 0.7]), atol=1e-12)

    def test_noisy_product(self):
        ens = Ensemble(np.array([0.3, 0.7]), (ZERO, ONE))
        table = classical_joint(completely_noisy_channel(2), ens, basis_povm(2))
        np.testing.assert_allclose(table, np.outer([0.3, 0.7], [0.5, 0.5]), atol=1e-12)

    def test_normalisation(self):
        for seed in range(20):
            ch, ens, povm = random_instance(600 + seed)
            assert abs(classical_joint(ch, ens, povm).sum() - 1.0) < 1e-10


class TestClassicalInformation:
    def test_product_table(self):
        assert abs(classical_mutual_information(np.outer([0.3, 0.7], [0.6, 0.4]))) < 1e-12

    def test_perfect_correlation(self):
        assert abs(classical_mutual_information(np.diag([0.5, 0.5])) - 1.0) < 1e-12

    def test_direct_sum_oracle(self):
        table = np.array([[0.3, 0.1], [0.2, 0.4]])
        got = classical_mutual_information(table)
        assert abs(got - 0.124511) < 1e-6
        # independent entropy-decomposition route
        h = shannon_entropy
        alt = h(table.sum(1)) + h(table.sum(0)) - h(table.ravel())
        assert abs(got - alt) < 1e-12

    def test_conditional_independence(self):
        # C independent of (J, B)
        jb = np.random.default_rng(0).random((2, 2))
        jb /= jb.sum()
        t = np.einsum("jb,c->jbc", jb, np.array([0.4, 0.6]))
        assert conditional_mutual_information(t) < 1e-12

    def test_conditional_copy(self):
        # J = C deterministically, B constant
        t = np.zeros((2, 1, 2))
        t[0, 0, 0] = 0.3
        t[1, 0, 1] = 0.7
        assert abs(conditional_mutual_information(t) - shannon_entropy([0.3, 0.7])) < 1e-12

    def test_chain_rule(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            t = rng.random((2, 2, 2))
            t /= t.sum()
            joint = classical_mutual_information(t.reshape(2, 4))
            split = classical_mutual_information(t.sum(axis=2)) + conditional_mutual_information(t)
            assert abs(joint - split) < 1e-12


class TestJointBlockState:
    def test_block_traces_match_joint(self):
        # cyclic-trace oracle: Tr[sqrt(s) E sqrt(s)] = Tr[s E]
        for seed in range(20):
            ch, ens, povm = random_instance(700 + seed)
            joint = joint_block_state(ch, ens, povm)
            table = classical_joint(ch, ens, povm)
            for (j, b), block in zip(joint.labels, joint.blocks):
                assert abs(np.trace(block).real - table[j, b]) < 1e-10

    def test_total_trace(self):
        ch, ens, povm = random_instance(720)
        joint = joint_block_state(ch, ens, povm)
        assert abs(sum(np.trace(b).real for b in joint.blocks) - 1.0) < 1e-10

    def test_dual_side_same_table(self):
        for seed in range(20):
            ch, ens, povm = random_instance(740 + seed)
            t1 = reduction(joint_block_state(ch, ens, povm, dual_side=False), "AB")
            t2 = reduction(joint_block_state(ch, ens, povm, dual_side=True), "AB")
            np.testing.assert_allclose(t1, t2, atol=1e-10)


class TestHolevo:
    def test_orthogonal_pair(self):
        ens = Ensemble(np.array([0.5, 0.5]), (ZERO, ONE))
        assert abs(holevo_information(identity_channel(2), ens) - 1.0) < 1e-12

    def test_single_state(self):
        ens = Ensemble(np.array([1.0]), (PLUS,))
        ch = random_channel(2, 2, seed=3)
        assert holevo_information(ch, ens) < 1e-12

    def test_zero_plus_value(self):
        # oracle: eigenvalues (1 +- 1/sqrt 2)/2 of the average state
        lam = np.array([(1 + 1 / np.sqrt(2)) / 2, (1 - 1 / np.sqrt(2)) / 2])
        expected = shannon_entropy(lam)
        got = holevo_information(identity_channel(2), zero_plus_ensemble())
        assert abs(got - expected) < 1e-12
        assert abs(got - 0.600876) < 1e-6

    def test_blocks_route(self):
        for seed in range(50):
            ch, ens, _ = random_instance(800 + seed)
            direct = holevo_information(ch, ens)
            blocks = holevo_information_via_blocks(ch, ens)
            assert abs(direct - blocks) < 1e-10


class TestWeightedDual:
    def test_identity_input(self):
        for seed in range(5):
            ch = random_channel(2, 2, seed=900 + seed)
            rho = random_density_matrix(2, np.random.default_rng(seed))
            np.testing.assert_allclose(weighted_dual(ch, rho, np.eye(2, dtype=complex)), rho, atol=1e-10)

    def test_maximally_mixed_scaling(self):
        ch = random_channel(2, 3, seed=905)
        e = random_povm(2, 2, np.random.default_rng(6)).elements[0]
        lhs = weighted_dual(ch, np.eye(2, dtype=complex) / 2, e)
        np.testing.assert_allclose(lhs, dual_apply(ch, e) / 2, atol=1e-10)

    def test_outcome_probabilities(self):
        # duality oracle: Tr of the sandwich equals the outcome probability
        for seed in range(10):
            ch, ens, povm = random_instance(910 + seed)
            rho = ens.average_state()
            for e in povm.elements:
                tau = np.trace(weighted_dual(ch, rho, e)).real
                direct = np.trace(apply(ch, rho) @ e).real
                assert abs(tau - direct) < 1e-10


class TestMeasuredInputInformation:
    def test_noisy_channel_zero(self):
        ch = completely_noisy_channel(2)
        rng = np.random.default_rng(7)
        for _ in range(5):
            rho = random_density_matrix(2, rng)
            m = random_povm(2, 3, rng)
            assert measured_input_information(ch, rho, m) < 1e-9

    def test_pure_input_zero(self):
        ch = random_channel(2, 2, seed=8)
        m = random_povm(2, 3, np.random.default_rng(9))
        assert measured_input_information(ch, pure_state([1.0, 0.0]), m) < 1e-9

    def test_identity_mixed_projective(self):
        # hand evaluation: 1 - 2*(1/2) + 1 = 1 bit
        got = measured_input_information(identity_channel(2), np.eye(2, dtype=complex) / 2, basis_povm(2))
        assert abs(got - 1.0) < 1e-12

    def test_blocks_route(self):
        for seed in range(50):
            ch, ens, povm = random_instance(1000 + seed)
            rho = ens.average_state()
            direct = measured_input_information(ch, rho, povm)
            blocks = measured_input_information_via_blocks(ch, rho, povm)
            assert abs(direct - blocks) < 1e-9


class TestEntanglementAssisted:
    def test_identity_bell(self):
        bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        assert abs(entanglement_assisted_information(identity_channel(2), bell) - 2.0) < 1e-9

    def test_product_vector(self):
        psi = np.kron(np.array([1.0, 0.0]), np.array([1.0, 1.0]) / np.sqrt(2)).astype(complex)
        assert entanglement_assisted_information(identity_channel(2), psi) < 1e-9

    def test_noisy_bell(self):
        bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        assert entanglement_assisted_information(completely_noisy_channel(2), bell) < 1e-9

    def test_norm_validated(self):
        with pytest.raises(InvariantViolation):
            entanglement_assisted_information(identity_channel(2), np.ones(4, dtype=complex))


class TestMonotonicityInstances:
    def test_outcome_vs_output_side(self):
        # coarse readout never beats the quantum-side comparison
        for seed in range(100):
            ch, ens, povm = random_instance(1100 + seed)
            joint = joint_block_state(ch, ens, povm)
            h_ab = classical_mutual_information(reduction(joint, "AB"))
            paq = reduction(joint, "AQ")
            prod = scaled_block_state(("A",), "Q", reduction(joint, "A"), reduction(joint, "Q"))
            h_aq = block_relative_entropy(paq, prod)
            assert h_ab <= h_aq + 1e-9

    def test_outcome_vs_input_side(self):
        for seed in range(100):
            ch, ens, povm = random_instance(1200 + seed)
            joint = joint_block_state(ch, ens, povm)
            h_ab = classical_mutual_information(reduction(joint, "AB"))
            pbr = input_outcome_block_state(ch, ens.average_state(), povm)
            prod = scaled_block_state(("B",), "R", reduction(pbr, "B"), reduction(pbr, "R"))
            h_br = block_relative_entropy(pbr, prod)
            assert h_ab <= h_br + 1e-9


class TestDataProcessingSanity:
    def test_measurement_channel_collapses_joint(self):
        # applying the outcome-recording channel blockwise maps the
        # label-output joint onto the label-outcome table
        for seed in range(20):
            ch, ens, povm = random_instance(1300 + seed)
            joint = joint_block_state(ch, ens, povm)
            paq = reduction(joint, "AQ")
            table = reduction(joint, "AB")
            record = measurement_channel(povm)
            for (j,), block in zip(paq.labels, paq.blocks):
                collapsed = apply(record, block / max(np.trace(block).real, 1e-300)) * np.trace(block).real
                np.testing.assert_allclose(np.diag(collapsed).real, table[j], atol=1e-10)

    def test_retrodiction_channel_maps_input_joint_to_table(self):
        # measure-and-relabel with the pretty good measurement turns the
        # outcome-input joint into the label-outcome table, transposed
        for seed in range(20):
            ch, ens, povm = random_instance(1400 + seed)
            rho = ens.average_state()
            pgm = pretty_good_measurement(ens.probs, ens.states)
            basis_states = [np.diag([1.0 if i == j else 0.0 for i in range(len(ens))]).astype(complex) for j in range(len(ens))]
            relabel = omega_channel(basis_states, pgm)
            pbr = input_outcome_block_state(ch, rho, povm)
            table = classical_joint(ch, ens, povm)
            for (b,), block in zip(pbr.labels, pbr.blocks):
                t = np.trace(block).real
                if t < 1e-12:
                    continue
                collapsed = apply(relabel, block / t) * t
                np.testing.assert_allclose(np.diag(collapsed).real, table[:, b], atol=1e-10)


class TestEnsemble:
    def test_average_state(self):
        ens = zero_plus_ensemble()
        np.testing.assert_allclose(ens.average_state(), 0.5 * ZERO + 0.5 * PLUS, atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            Ensemble(np.array([0.5, 0.5]), (ZERO,))

    def test_invalid_state(self):
        with pytest.raises(InvariantViolation):
            Ensemble(np.array([1.0]), (np.eye(2, dtype=complex),))
