"""Canonical states, observable sets and ready-made benchmark scenarios."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import Register, kron
from .spectrum import MerlScenario, ObservablePair
from .states import QuantumState

SQRT2 = float(np.sqrt(2.0))

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# spin-1 matrices, hbar = 1, basis order m = +1, 0, -1
SPIN1_X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / SQRT2
SPIN1_Y = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / SQRT2
SPIN1_Z = np.diag([1.0, 0.0, -1.0]).astype(complex)


def basis_state(dims: Sequence[int], digits: Sequence[int]) -> QuantumState:
    """Computational basis state |digits> on a register with the given dims."""
    reg = Register(dims)
    if len(digits) != reg.n_sites:
        raise ValueError(f"need {reg.n_sites} digits, got {len(digits)}")
    idx = 0
    for site, (digit, d) in enumerate(zip(digits, reg.dims)):
        if not 0 <= digit < d:
            raise ValueError(f"digit {digit} out of range for site {site} with dim {d}")
        idx = idx * d + digit
    v = np.zeros(reg.total_dim, dtype=complex)
    v[idx] = 1.0
    return QuantumState(reg, vector=v)


def ghz(n: int, d: int = 2) -> QuantumState:
    """(|0...0> + |d-1,...,d-1>)/sqrt(2) on n sites of dimension d."""
    if n < 2:
        raise ValueError("a GHZ state needs at least two sites")
    reg = Register.qudits(n, d)
    v = np.zeros(reg.total_dim, dtype=complex)
    v[0] = 1 / SQRT2
    v[-1] = 1 / SQRT2
    return QuantumState(reg, vector=v)


def w_state(n: int) -> QuantumState:
    """Equal superposition of the n single-excitation qubit basis states."""
    if n < 2:
        raise ValueError("a W state needs at least two sites")
    reg = Register.qubits(n)
    v = np.zeros(reg.total_dim, dtype=complex)
    for site in range(n):
        v[1 << (n - 1 - site)] = 1 / np.sqrt(n)
    return QuantumState(reg, vector=v)


def singlet() -> QuantumState:
    """The two-qubit singlet (|01> - |10>)/sqrt(2).

    The one maximally entangled qubit pair that steers the first qubit onto
    an eigenstate of whatever direction is measured on the second, so equal
    measured/control observables predict every outcome exactly.
    """
    return QuantumState.pure(Register.qubits(2), [0, 1 / SQRT2, -1 / SQRT2, 0])


def separable_composite(blocks: Sequence[QuantumState]) -> QuantumState:
    """Tensor product of the given states, register dims concatenated in order."""
    if not blocks:
        raise ValueError("need at least one block")
    dims: tuple[int, ...] = ()
    for b in blocks:
        dims = dims + b.reg.dims
    reg = Register(dims)
    if all(b.is_pure for b in blocks):
        v = blocks[0].vector
        for b in blocks[1:]:
            v = np.kron(v, b.vector)
        return QuantumState(reg, vector=v)
    rho = blocks[0].density()
    for b in blocks[1:]:
        rho = kron(rho, b.density())
    return QuantumState(reg, rho=rho)


# The three-photon orbital-angular-momentum state uses three labels per
# photon; a basis map sends the label positions (as listed for each photon)
# to local basis indices.  The positional reading keeps the listed order;
# the m-value reading puts each label with a valid spin-1 m onto the
# matching (m=+1,0,-1) slot and fills the rest in listed order.
OAM_MAPS_POSITIONAL: tuple[tuple[int, int, int], ...] = ((0, 1, 2), (0, 1, 2), (0, 1, 2))
OAM_MAPS_M_VALUE: tuple[tuple[int, int, int], ...] = ((0, 2, 1), (1, 2, 0), (1, 2, 0))


@dataclass(frozen=True)
class OamGhzParams:
    """Weight and basis-index maps for the three-photon OAM state family."""

    mu: float
    basis_maps: tuple[tuple[int, int, int], ...] = OAM_MAPS_POSITIONAL

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1 / SQRT2 + 1e-12:
            raise ValueError(f"mu = {self.mu} outside [0, 1/sqrt(2)]")
        maps = tuple(tuple(int(i) for i in m) for m in self.basis_maps)
        if len(maps) != 3 or any(sorted(m) != [0, 1, 2] for m in maps):
            raise ValueError("basis_maps must be three permutations of (0, 1, 2)")
        object.__setattr__(self, "basis_maps", maps)


def oam_ghz(params: OamGhzParams) -> QuantumState:
    """Three-qutrit photon state sqrt(1-2*mu^2)|a,0,0> + mu|b,1,1> - mu|c,2,2>.

    Label positions per photon follow the listed eigenvector order and are
    routed to local basis indices through ``params.basis_maps``.  At
    mu = 1/sqrt(3) all three amplitudes have equal magnitude (a true GHZ
    state); at mu = 0 the state is a product.
    """
    mu = params.mu
    amps = (float(np.sqrt(max(1.0 - 2.0 * mu * mu, 0.0))), mu, -mu)
    reg = Register.qudits(3, 3)
    v = np.zeros(27, dtype=complex)
    for pos, a in enumerate(amps):
        i1, i2, i3 = (params.basis_maps[h][pos] for h in range(3))
        v[(i1 * 3 + i2) * 3 + i3] = a
    return QuantumState(reg, vector=v)


def pauli_set() -> tuple[ObservablePair, ...]:
    """The four qubit pairs: x, y, z and their sum, measured = control."""
    return (
        ObservablePair(SIGMA_X),
        ObservablePair(SIGMA_Y),
        ObservablePair(SIGMA_Z),
        ObservablePair(SIGMA_X + SIGMA_Y + SIGMA_Z),
    )


def spin1_set() -> tuple[ObservablePair, ...]:
    """The four spin-1 pairs: Jx, Jy, Jz and their sum, measured = control."""
    return (
        ObservablePair(SPIN1_X),
        ObservablePair(SPIN1_Y),
        ObservablePair(SPIN1_Z),
        ObservablePair(SPIN1_X + SPIN1_Y + SPIN1_Z),
    )


def four_qubit_scenarios() -> tuple[tuple[str, MerlScenario], ...]:
    """The four canonical four-qubit benchmarks, one per separability class.

    Site 0 is measured, sites 1-3 are controls in order, all with the Pauli
    pair set in sum-of-variances mode.  Split counts resolve the classes:
    3 for the GHZ state, 2 for GHZ3 x |0>, 1 for Bell x |00>, 0 for |0000>.
    """
    zero = basis_state([2], [0])
    states = (
        ("ghz4", ghz(4)),
        ("ghz3_product", separable_composite([ghz(3), zero])),
        ("bell_product", separable_composite([ghz(2), zero, zero])),
        ("product", basis_state([2, 2, 2, 2], [0, 0, 0, 0])),
    )
    return tuple(
        (
            name,
            MerlScenario(
                state=state,
                measured_site=0,
                control_sites=(1, 2, 3),
                pairs=pauli_set(),
            ),
        )
        for name, state in states
    )


def oam_photon_scenario(
    mu: float,
    basis_maps: tuple[tuple[int, int, int], ...] = OAM_MAPS_POSITIONAL,
) -> MerlScenario:
    """Three-photon qutrit benchmark: photon 1 measured, photons 2 and 3 controls."""
    return MerlScenario(
        state=oam_ghz(OamGhzParams(mu, basis_maps)),
        measured_site=0,
        control_sites=(1, 2),
        pairs=spin1_set(),
    )
