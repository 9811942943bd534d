import numpy as np
import pytest

from merl import (
    MerlScenario,
    OamGhzParams,
    OAM_MAPS_M_VALUE,
    OAM_MAPS_POSITIONAL,
    four_qubit_scenarios,
    ghz,
    merl_spectrum,
    oam_ghz,
    oam_photon_scenario,
    pauli_set,
    separable_composite,
    singlet,
    spin1_set,
    w_state,
)
from merl.scenarios import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SPIN1_X,
    SPIN1_Y,
    SPIN1_Z,
    basis_state,
)

from oracles import W3_LINES, merl_lines

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)


class TestStateBuilders:
    def test_ghz4_amplitudes(self):
        state = ghz(4)
        v = state.vector
        assert v[0] == pytest.approx(1 / SQRT2)
        assert v[15] == pytest.approx(1 / SQRT2)
        assert np.count_nonzero(v) == 2

    def test_ghz2_is_bell(self):
        assert np.allclose(ghz(2).vector, [1 / SQRT2, 0, 0, 1 / SQRT2])

    def test_ghz_normalized(self):
        for n, d in [(2, 2), (3, 3), (4, 2)]:
            v = ghz(n, d).vector
            assert np.vdot(v, v).real == pytest.approx(1.0, abs=1e-12)

    def test_ghz_qutrit_endpoints(self):
        v = ghz(3, d=3).vector
        assert v[0] == pytest.approx(1 / SQRT2)
        assert v[26] == pytest.approx(1 / SQRT2)

    def test_w3_amplitudes(self):
        v = w_state(3).vector
        assert np.flatnonzero(np.abs(v) > 1e-12).tolist() == [1, 2, 4]
        assert np.allclose(v[[1, 2, 4]], 1 / SQRT3)

    def test_singlet_antisymmetric(self):
        v = singlet().vector
        assert np.allclose(v, [0, 1 / SQRT2, -1 / SQRT2, 0])

    def test_separable_composite_matches_ghz3_padding(self):
        state = separable_composite([ghz(3), basis_state([2], [0])])
        expected = np.zeros(16, dtype=complex)
        expected[0b0000] = 1 / SQRT2
        expected[0b1110] = 1 / SQRT2
        assert np.allclose(state.vector, expected)
        assert state.reg.dims == (2, 2, 2, 2)

    def test_separable_composite_bell_padding(self):
        state = separable_composite([ghz(2), basis_state([2], [0]), basis_state([2], [0])])
        expected = np.zeros(16, dtype=complex)
        expected[0b0000] = 1 / SQRT2
        expected[0b1100] = 1 / SQRT2
        assert np.allclose(state.vector, expected)

    def test_separable_composite_all_zero(self):
        state = separable_composite([basis_state([2], [0])] * 4)
        assert state.vector[0] == pytest.approx(1.0)

    def test_separable_composite_mixed_blocks(self):
        from merl import Register, random_mixed

        rng = np.random.default_rng(0)
        a = random_mixed(Register([2]), rng)
        b = random_mixed(Register([3]), rng)
        state = separable_composite([a, b])
        assert not state.is_pure
        assert state.reg.dims == (2, 3)
        assert np.allclose(state.rho, np.kron(a.rho, b.rho))

    def test_basis_state_digit_checks(self):
        with pytest.raises(ValueError, match="digit"):
            basis_state([2, 2], [0, 2])
        with pytest.raises(ValueError, match="digits"):
            basis_state([2, 2], [0])


class TestOamState:
    def test_mu_zero_is_product(self):
        v = oam_ghz(OamGhzParams(0.0)).vector
        assert np.count_nonzero(np.abs(v) > 1e-12) == 1
        assert v[0] == pytest.approx(1.0)

    def test_true_ghz_point(self):
        mu = 1 / SQRT3
        v = oam_ghz(OamGhzParams(mu)).vector
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        assert nz.tolist() == [0, 13, 26]  # diagonal indices (0,0,0),(1,1,1),(2,2,2)
        assert np.allclose(np.abs(v[nz]), 1 / SQRT3)
        assert v[13] > 0 and v[26] < 0

    def test_extreme_mu_drops_first_term(self):
        v = oam_ghz(OamGhzParams(1 / SQRT2)).vector
        assert abs(v[0]) < 1e-12
        assert np.count_nonzero(np.abs(v) > 1e-12) == 2

    def test_mu_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="mu"):
            OamGhzParams(0.8)
        with pytest.raises(ValueError, match="mu"):
            OamGhzParams(-0.1)

    def test_bad_basis_maps_rejected(self):
        with pytest.raises(ValueError, match="permutations"):
            OamGhzParams(0.3, basis_maps=((0, 1, 2), (0, 1, 1), (0, 1, 2)))

    def test_alternate_map_relocates_amplitudes(self):
        v = oam_ghz(OamGhzParams(0.3, OAM_MAPS_M_VALUE)).vector
        # label positions (0,1,2) -> photon1 indices (0,2,1), photons 2,3 (1,2,0)
        idx = lambda i1, i2, i3: (i1 * 3 + i2) * 3 + i3
        assert abs(v[idx(0, 1, 1)]) > 0.8  # sqrt(1-2mu^2) term
        assert v[idx(2, 2, 2)] == pytest.approx(0.3)
        assert v[idx(1, 0, 0)] == pytest.approx(-0.3)


class TestObservableSets:
    def test_pauli_matrices(self):
        (x, y, z, s) = pauli_set()
        assert np.array_equal(x.q, np.array([[0, 1], [1, 0]]))
        assert np.array_equal(y.q, np.array([[0, -1j], [1j, 0]]))
        assert np.array_equal(z.q, np.diag([1, -1]).astype(complex))
        assert np.allclose(sorted(np.linalg.eigvalsh(s.q)), [-np.sqrt(3), np.sqrt(3)])
        assert all(p.o is None and p.o_by_site is None for p in pauli_set())

    def test_spin1_commutator(self):
        comm = SPIN1_X @ SPIN1_Y - SPIN1_Y @ SPIN1_X
        assert np.abs(comm - 1j * SPIN1_Z).max() < 1e-12

    def test_spin1_z_spectrum(self):
        assert np.allclose(np.diag(SPIN1_Z), [1, 0, -1])
        assert np.trace(SPIN1_X) == pytest.approx(0.0)

    def test_spin1_set_composition(self):
        (jx, jy, jz, js) = spin1_set()
        assert np.array_equal(js.q, SPIN1_X + SPIN1_Y + SPIN1_Z)


class TestReadyMadeScenarios:
    def test_four_qubit_scenario_shapes(self):
        scenarios = four_qubit_scenarios()
        assert len(scenarios) == 4
        for _, sc in scenarios:
            assert len(sc.pairs) == 4
            assert sc.control_sites == (1, 2, 3)
            assert sc.measured_site == 0
            assert sc.l_tra is None

    def test_oam_scenario_register(self):
        sc = oam_photon_scenario(0.4)
        assert sc.state.reg.dims == (3, 3, 3)
        assert sc.control_sites == (1, 2)
        assert len(sc.pairs) == 4

    def test_oam_split_counts(self):
        assert merl_spectrum(oam_photon_scenario(1 / SQRT3)).split_count == 2
        assert merl_spectrum(oam_photon_scenario(0.0)).split_count == 0

    def test_w3_scenario_lines(self):
        sc = MerlScenario(
            state=w_state(3), measured_site=0, control_sites=(1, 2), pairs=pauli_set()
        )
        spectrum = merl_spectrum(sc)
        assert np.allclose(spectrum.lines, W3_LINES, atol=1e-8)
        oracle = merl_lines(
            w_state(3).vector,
            [2, 2, 2],
            [(np.asarray(p.q), np.asarray(p.q)) for p in pauli_set()],
            0,
            [1, 2],
        )
        assert np.allclose(spectrum.lines, oracle, atol=1e-10)
        assert spectrum.split_count == 2
        assert spectrum.verdict.genuinely_entangled
