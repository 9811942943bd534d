import numpy as np
import pytest

from merl import (
    ControlChain,
    Observable,
    QuantumState,
    Register,
    cond_variance_given_outcome,
    control_relation_residual,
    expected_cond_variance,
    ghz,
    haar_random_pure,
    measure_branches,
    nested_correction_term,
    pauli_set,
    random_hermitian,
    separable_composite,
    sequential_expected_cond_variance,
    singlet,
    variance,
    variance_of_cond_expectation,
)
from merl.scenarios import SIGMA_X, SIGMA_Z, basis_state

from oracles import (
    COUNTEREXAMPLE_AMPS,
    COUNTEREXAMPLE_BRANCH_VARIANCE,
    COUNTEREXAMPLE_EXPECTED_COND_VARIANCE,
    COUNTEREXAMPLE_VARIANCE,
    seq_ev,
    vce_dm,
)

PAULI_SUM = SIGMA_X + np.array([[0, -1j], [1j, 0]]) + SIGMA_Z


def two_qubit_counterexample():
    reg = Register([2, 2])
    return reg, QuantumState.pure(reg, COUNTEREXAMPLE_AMPS)


def random_product_state(seed):
    rng = np.random.default_rng(seed)
    blocks = [haar_random_pure(Register([2]), int(rng.integers(10**6))) for _ in range(3)]
    return separable_composite(blocks)


class TestControlChain:
    def test_rejects_site_collision(self):
        reg = Register([2, 2])
        with pytest.raises(ValueError, match="distinct"):
            ControlChain(0, (Observable(reg, 0, SIGMA_Z),))

    def test_prefix(self):
        reg = Register([2, 2, 2])
        chain = ControlChain(
            0, (Observable(reg, 1, SIGMA_Z), Observable(reg, 2, SIGMA_Z))
        )
        assert len(chain.prefix(1)) == 1
        with pytest.raises(ValueError):
            chain.prefix(3)


class TestOutcomeConditonedVariance:
    def test_counterexample_outcome_raises_variance(self):
        reg, state = two_qubit_counterexample()
        q = Observable(reg, 0, SIGMA_Z)
        o = Observable(reg, 1, SIGMA_Z)
        assert variance(q, state) == pytest.approx(COUNTEREXAMPLE_VARIANCE, abs=1e-12)
        plus = next(b for b in measure_branches(o, state) if b.eigenvalue > 0)
        v_cond = cond_variance_given_outcome(q, plus)
        assert v_cond == pytest.approx(COUNTEREXAMPLE_BRANCH_VARIANCE, abs=1e-12)
        assert v_cond > variance(q, state)

    def test_bell_branches_have_zero_variance(self):
        state = ghz(2)
        q = Observable(state.reg, 0, SIGMA_Z)
        o = Observable(state.reg, 1, SIGMA_Z)
        for branch in measure_branches(o, state):
            assert cond_variance_given_outcome(q, branch) == pytest.approx(0.0, abs=1e-12)

    def test_product_state_branch_variance_is_unconditional(self):
        state = random_product_state(4)
        q = Observable(state.reg, 0, PAULI_SUM)
        o = Observable(state.reg, 1, SIGMA_X)
        v = variance(q, state)
        for branch in measure_branches(o, state):
            if not branch.pruned:
                assert cond_variance_given_outcome(q, branch) == pytest.approx(v, abs=1e-10)

    def test_pruned_branch_rejected(self):
        reg = Register([2, 2])
        state = basis_state([2, 2], [0, 0])
        o = Observable(reg, 1, SIGMA_Z)
        pruned = next(b for b in measure_branches(o, state) if b.pruned)
        with pytest.raises(ValueError, match="zero-probability"):
            cond_variance_given_outcome(Observable(reg, 0, SIGMA_Z), pruned)


class TestExpectedCondVariance:
    def test_bell_is_fully_predicted(self):
        state = ghz(2)
        q = Observable(state.reg, 0, SIGMA_Z)
        o = Observable(state.reg, 1, SIGMA_Z)
        assert expected_cond_variance(q, o, state) == pytest.approx(0.0, abs=1e-12)

    def test_product_state_gains_nothing(self):
        state = random_product_state(9)
        q = Observable(state.reg, 0, PAULI_SUM)
        o = Observable(state.reg, 1, PAULI_SUM)
        assert expected_cond_variance(q, o, state) == pytest.approx(
            variance(q, state), abs=1e-10
        )

    def test_counterexample_average_reduces(self):
        reg, state = two_qubit_counterexample()
        q = Observable(reg, 0, SIGMA_Z)
        o = Observable(reg, 1, SIGMA_Z)
        ecv = expected_cond_variance(q, o, state)
        assert ecv == pytest.approx(COUNTEREXAMPLE_EXPECTED_COND_VARIANCE, abs=1e-12)
        assert ecv <= variance(q, state) + 1e-12

    def test_site_collision_rejected(self):
        reg = Register([2, 2])
        state = ghz(2)
        q = Observable(reg, 0, SIGMA_Z)
        with pytest.raises(ValueError, match="collide"):
            expected_cond_variance(q, q, state)


class TestSequential:
    def test_ghz4_sigma_z_chain_collapses(self):
        state = ghz(4)
        q = Observable(state.reg, 0, SIGMA_Z)
        controls = [Observable(state.reg, s, SIGMA_Z) for s in (1, 2, 3)]
        assert sequential_expected_cond_variance(q, controls, state) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_ghz4_sigma_x_chain_collapses(self):
        state = ghz(4)
        q = Observable(state.reg, 0, SIGMA_X)
        controls = [Observable(state.reg, s, SIGMA_X) for s in (1, 2, 3)]
        assert sequential_expected_cond_variance(q, controls, state) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_single_control_matches_expected_cond_variance(self):
        state = haar_random_pure(Register([2, 3]), seed=21)
        rng = np.random.default_rng(0)
        q = Observable(state.reg, 0, random_hermitian(2, rng))
        o = Observable(state.reg, 1, random_hermitian(3, rng))
        assert sequential_expected_cond_variance(q, [o], state) == expected_cond_variance(
            q, o, state
        )

    def test_matches_brute_force_enumeration(self):
        state = haar_random_pure(Register([2, 2, 3]), seed=33)
        rng = np.random.default_rng(1)
        qm = random_hermitian(2, rng)
        o1 = random_hermitian(2, rng)
        o2 = random_hermitian(3, rng)
        q = Observable(state.reg, 0, qm)
        controls = [Observable(state.reg, 1, o1), Observable(state.reg, 2, o2)]
        got = sequential_expected_cond_variance(q, controls, state)
        want = seq_ev(state.density(), [2, 2, 3], qm, 0, [o1, o2], [1, 2])
        assert got == pytest.approx(want, abs=1e-10)


class TestVarianceOfCondExpectation:
    def test_bell_sigma_z(self):
        state = ghz(2)
        q = Observable(state.reg, 0, SIGMA_Z)
        o = Observable(state.reg, 1, SIGMA_Z)
        # branch expectations are +-1 with probability 1/2 each
        assert variance_of_cond_expectation(q, o, state) == pytest.approx(1.0, abs=1e-12)

    def test_product_state_is_flat(self):
        state = random_product_state(5)
        q = Observable(state.reg, 0, SIGMA_Z)
        o = Observable(state.reg, 1, PAULI_SUM)
        assert variance_of_cond_expectation(q, o, state) == pytest.approx(0.0, abs=1e-10)

    def test_bell_pauli_sum_third(self):
        # Bell branches for the x+y+z direction land on the conjugate Bloch
        # vector, whose overlap with the direction is 1/3; the branch
        # expectations are +-sqrt(3)/3... cross-checked by brute force.
        state = ghz(2)
        q = Observable(state.reg, 0, PAULI_SUM)
        o = Observable(state.reg, 1, PAULI_SUM)
        got = variance_of_cond_expectation(q, o, state)
        want = vce_dm(state.density(), [2, 2], PAULI_SUM, 0, PAULI_SUM, 1)
        assert got == pytest.approx(1 / 3, abs=1e-12)
        assert got == pytest.approx(want, abs=1e-12)


class TestNestedCorrection:
    def test_uncorrelated_target_vanishes(self):
        state = separable_composite(
            [ghz(2), basis_state([2], [0]), basis_state([2], [0])]
        )
        q = Observable(state.reg, 0, SIGMA_Z)
        target = Observable(state.reg, 2, SIGMA_Z)
        prior = Observable(state.reg, 1, SIGMA_Z)
        assert nested_correction_term(q, target, [prior], state) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_ghz3_sigma_z_already_collapsed(self):
        state = ghz(3)
        q = Observable(state.reg, 0, SIGMA_Z)
        target = Observable(state.reg, 2, SIGMA_Z)
        prior = Observable(state.reg, 1, SIGMA_Z)
        assert nested_correction_term(q, target, [prior], state) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_ghz3_sigma_x_bell_residue(self):
        # after an x measurement on the first control, measured+second
        # control form a Bell-type pair in the x basis
        state = ghz(3)
        q = Observable(state.reg, 0, SIGMA_X)
        target = Observable(state.reg, 2, SIGMA_X)
        prior = Observable(state.reg, 1, SIGMA_X)
        got = nested_correction_term(q, target, [prior], state)
        assert got == pytest.approx(1.0, abs=1e-12)

    def test_empty_priors_degenerate_to_vce(self):
        state = haar_random_pure(Register([2, 2]), seed=8)
        q = Observable(state.reg, 0, SIGMA_X)
        target = Observable(state.reg, 1, SIGMA_Z)
        assert nested_correction_term(q, target, [], state) == variance_of_cond_expectation(
            q, target, state
        )


class TestRelationResidual:
    def _random_chain_setup(self, seed, dims):
        rng = np.random.default_rng(seed)
        reg = Register(dims)
        state = haar_random_pure(reg, seed)
        qs = [Observable(reg, 0, random_hermitian(dims[0], rng)) for _ in range(2)]
        chains = [
            [Observable(reg, s, random_hermitian(dims[s], rng)) for s in range(1, len(dims))]
            for _ in qs
        ]
        return state, qs, chains

    def test_equality_at_variance_sum(self):
        for seed, dims in [(0, [2, 2]), (1, [2, 3, 2]), (2, [3, 2, 3])]:
            state, qs, chains = self._random_chain_setup(seed, dims)
            l_tra = sum(variance(q, state) for q in qs)
            residual = control_relation_residual(qs, chains, state, l_tra=l_tra)
            assert residual == pytest.approx(0.0, abs=1e-8)

    def test_singlet_breaks_traditional_bound(self):
        state = singlet()
        qs = [Observable(state.reg, 0, p.q) for p in pauli_set()]
        chains = [[Observable(state.reg, 1, p.q)] for p in pauli_set()]
        lhs = sum(sequential_expected_cond_variance(q, c, state) for q, c in zip(qs, chains))
        l_tra = sum(variance(q, state) for q in qs)
        assert l_tra == pytest.approx(6.0, abs=1e-9)
        assert lhs <= 1e-12  # every outcome predicted exactly
        rhs = l_tra - sum(
            variance_of_cond_expectation(q, c[0], state) for q, c in zip(qs, chains)
        )
        assert rhs <= 1e-12  # conditioned bound collapses to (or below) zero

    def test_product_state_reduces_to_traditional_relation(self):
        state = random_product_state(12)
        qs = [Observable(state.reg, 0, SIGMA_X), Observable(state.reg, 0, SIGMA_Z)]
        chains = [
            [Observable(state.reg, 1, SIGMA_X), Observable(state.reg, 2, SIGMA_X)]
            for _ in qs
        ]
        sum_v = sum(variance(q, state) for q in qs)
        l_tra = 0.25
        residual = control_relation_residual(qs, chains, state, l_tra=l_tra)
        assert residual == pytest.approx(sum_v - l_tra, abs=1e-9)


class TestIdentities:
    def _instances(self, count, dims_cycle=((2, 2), (2, 3), (3, 3))):
        for trial in range(count):
            dims = dims_cycle[trial % len(dims_cycle)]
            rng = np.random.default_rng(1000 + trial)
            reg = Register(dims)
            state = haar_random_pure(reg, 1000 + trial)
            q = Observable(reg, 0, random_hermitian(dims[0], rng))
            o = Observable(reg, 1, random_hermitian(dims[1], rng))
            yield state, q, o

    def test_law_of_total_variance(self):
        for state, q, o in self._instances(150):
            v = variance(q, state)
            ecv = expected_cond_variance(q, o, state)
            vce = variance_of_cond_expectation(q, o, state)
            assert abs(v - ecv - vce) <= 1e-9

    def test_variance_reduction(self):
        for state, q, o in self._instances(150):
            assert expected_cond_variance(q, o, state) <= variance(q, state) + 1e-9

    def test_telescoping_identity(self):
        for trial in range(60):
            dims = ((2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3, 2))[trial % 4]
            rng = np.random.default_rng(2000 + trial)
            reg = Register(dims)
            state = haar_random_pure(reg, 2000 + trial)
            q = Observable(reg, 0, random_hermitian(dims[0], rng))
            controls = [
                Observable(reg, s, random_hermitian(dims[s], rng))
                for s in range(1, len(dims))
            ]
            for m in range(2, len(controls) + 1):
                lhs = sequential_expected_cond_variance(
                    q, controls[: m - 1], state
                ) - sequential_expected_cond_variance(q, controls[:m], state)
                rhs = nested_correction_term(q, controls[m - 1], controls[: m - 1], state)
                assert abs(lhs - rhs) <= 1e-8

    def test_chain_monotonicity(self):
        # 500 Haar-random trials over mixed qubit/qutrit registers
        for trial in range(500):
            dims = ((2, 2, 2), (2, 3, 2), (3, 3, 2), (2, 2, 3))[trial % 4]
            rng = np.random.default_rng(3000 + trial)
            reg = Register(dims)
            state = haar_random_pure(reg, 3000 + trial)
            q = Observable(reg, 0, random_hermitian(dims[0], rng))
            controls = [
                Observable(reg, s, random_hermitian(dims[s], rng))
                for s in range(1, len(dims))
            ]
            prev = variance(q, state)
            for m in range(1, len(controls) + 1):
                cur = sequential_expected_cond_variance(q, controls[:m], state)
                assert cur <= prev + 1e-9
                prev = cur
