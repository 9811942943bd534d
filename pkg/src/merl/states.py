"""States, observables, expectation values and projective measurement.

Pure states are kept in amplitude-vector form through measurement chains;
density matrices are supported everywhere the variance machinery is
state-agnostic.  Measurement uses the Lueders update: for outcome projector
P the state maps to ``P rho P / tr(P rho P)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .linalg import Register, frozen, hermitian_eig_grouped, is_hermitian, partial_trace

PRUNE_TOL_DEFAULT = 1e-12
_NORM_TOL = 1e-10
_EIG_FLOOR = -1e-9


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure amplitude vector or density matrix over a register."""

    reg: Register
    vector: np.ndarray | None = None
    rho: np.ndarray | None = None

    def __post_init__(self):
        if (self.vector is None) == (self.rho is None):
            raise ValueError("state needs exactly one of amplitude vector or density matrix")
        d = self.reg.total_dim
        if self.vector is not None:
            v = np.asarray(self.vector, dtype=complex).reshape(-1)
            if v.shape != (d,):
                raise ValueError(f"amplitude vector has length {v.size}, register dim is {d}")
            norm2 = float(np.vdot(v, v).real)
            if abs(norm2 - 1.0) > _NORM_TOL:
                raise ValueError(f"amplitude vector norm^2 = {norm2}, expected 1")
            object.__setattr__(self, "vector", frozen(v))
        else:
            m = np.asarray(self.rho, dtype=complex)
            if m.shape != (d, d):
                raise ValueError(f"density matrix shape {m.shape} does not match register dim {d}")
            if not is_hermitian(m):
                raise ValueError("density matrix is not Hermitian within tolerance")
            tr = float(np.trace(m).real)
            if abs(tr - 1.0) > _NORM_TOL:
                raise ValueError(f"density matrix trace = {tr}, expected 1")
            low = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
            if low < _EIG_FLOOR:
                raise ValueError(f"density matrix has eigenvalue {low} below tolerance")
            object.__setattr__(self, "rho", frozen(m))

    @classmethod
    def pure(cls, reg: Register, amplitudes: Iterable[complex]) -> "QuantumState":
        if not isinstance(amplitudes, np.ndarray):
            amplitudes = np.array(list(amplitudes), dtype=complex)
        return cls(reg, vector=amplitudes)

    @classmethod
    def mixed(cls, reg: Register, rho: np.ndarray) -> "QuantumState":
        return cls(reg, rho=rho)

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    def density(self) -> np.ndarray:
        """Full density matrix (outer product for pure states)."""
        if self.vector is not None:
            return np.outer(self.vector, self.vector.conj())
        return np.asarray(self.rho)

    def reduced(self, keep: Iterable[int]) -> np.ndarray:
        """Reduced density matrix on the kept sites (original relative order)."""
        keep_list = sorted({self.reg.check_site(int(s)) for s in keep})
        if not keep_list:
            raise ValueError("keep set must name at least one site")
        if self.vector is not None:
            t = self.vector.reshape(self.reg.dims)
            dropped = [i for i in range(self.reg.n_sites) if i not in keep_list]
            red = np.tensordot(t, t.conj(), axes=(dropped, dropped))
            kd = int(np.prod([self.reg.dims[i] for i in keep_list]))
            return red.reshape(kd, kd)
        return partial_trace(self.rho, self.reg, keep_list)


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator on one site, with its grouped spectral decomposition cached."""

    reg: Register
    site: int
    matrix: np.ndarray
    spectrum: tuple[tuple[float, np.ndarray], ...] = field(init=False, compare=False)

    def __post_init__(self):
        self.reg.check_site(self.site)
        m = np.asarray(self.matrix, dtype=complex)
        d = self.reg.dims[self.site]
        if m.shape != (d, d):
            raise ValueError(
                f"observable of shape {m.shape} does not fit site {self.site} with dim {d}"
            )
        if not is_hermitian(m):
            raise ValueError("observable matrix is not Hermitian within tolerance")
        object.__setattr__(self, "matrix", frozen(m))
        spec = tuple((lam, frozen(p)) for lam, p in hermitian_eig_grouped(m))
        object.__setattr__(self, "spectrum", spec)


@dataclass(frozen=True, eq=False)
class OutcomeBranch:
    """One measurement outcome: eigenvalue, probability and post-measurement state.

    Branches whose probability falls below the pruning threshold carry no
    post-state (`state is None`, `pruned` set); they contribute zero to every
    expectation downstream.
    """

    eigenvalue: float
    probability: float
    state: QuantumState | None
    pruned: bool = False


def _check_same_register(a_reg: Register, b_reg: Register) -> None:
    if a_reg != b_reg:
        raise ValueError(f"register mismatch: {a_reg.dims} vs {b_reg.dims}")


def _apply_local_to_vector(op: np.ndarray, site: int, reg: Register, vec: np.ndarray) -> np.ndarray:
    left = int(np.prod(reg.dims[:site], initial=1))
    d = reg.dims[site]
    t = vec.reshape(left, d, -1)
    return np.einsum("ab,lbr->lar", op, t).reshape(-1)


def _apply_local_to_rho(op: np.ndarray, site: int, reg: Register, rho: np.ndarray) -> np.ndarray:
    """op rho op^dagger with op acting on one site."""
    left = int(np.prod(reg.dims[:site], initial=1))
    d = reg.dims[site]
    right = reg.total_dim // (left * d)
    t = rho.reshape(left, d, right, left, d, right)
    out = np.einsum("ab,lbrmcs,dc->larmds", op, t, op.conj())
    return out.reshape(reg.total_dim, reg.total_dim)


def expectation(q: Observable, s: QuantumState) -> float:
    """Expected value of a single-site observable."""
    _check_same_register(q.reg, s.reg)
    red = s.reduced((q.site,))
    val = complex(np.trace(red @ q.matrix))
    if abs(val.imag) > 1e-9:
        raise ValueError(f"expectation has imaginary residue {val.imag}")
    return val.real


def variance(q: Observable, s: QuantumState) -> float:
    """Variance tr(rho Q^2) - tr(rho Q)^2, clamped at zero against rounding."""
    _check_same_register(q.reg, s.reg)
    red = s.reduced((q.site,))
    e = float(np.trace(red @ q.matrix).real)
    e2 = float(np.trace(red @ q.matrix @ q.matrix).real)
    v = e2 - e * e
    if v < -1e-10:
        raise ValueError(f"variance evaluated to {v}; state or observable is inconsistent")
    return max(v, 0.0)


def measure_branches(
    o: Observable, s: QuantumState, prune_tol: float = PRUNE_TOL_DEFAULT
) -> list[OutcomeBranch]:
    """Project onto each eigenspace of `o` and return all outcome branches.

    For each spectral entry ``(lam, P)`` the probability is
    ``tr((I x P) rho (I x P))`` and the surviving post-state is the Lueders
    update; pure inputs stay in vector form.  Branches below `prune_tol` are
    returned with their probability but no post-state.
    """
    _check_same_register(o.reg, s.reg)
    branches: list[OutcomeBranch] = []
    for lam, proj in o.spectrum:
        if s.is_pure:
            w = _apply_local_to_vector(proj, o.site, s.reg, s.vector)
            p = float(np.vdot(w, w).real)
            if p < prune_tol:
                branches.append(OutcomeBranch(lam, p, None, pruned=True))
            else:
                branches.append(
                    OutcomeBranch(lam, p, QuantumState(s.reg, vector=w / np.sqrt(p)))
                )
        else:
            sub = _apply_local_to_rho(proj, o.site, s.reg, s.rho)
            p = float(np.trace(sub).real)
            if p < prune_tol:
                branches.append(OutcomeBranch(lam, p, None, pruned=True))
            else:
                branches.append(OutcomeBranch(lam, p, QuantumState(s.reg, rho=sub / p)))
    return branches


def robertson_check(r: Observable, s: Observable, st: QuantumState) -> tuple[float, float]:
    """Both sides of the product uncertainty relation V(R)V(S) >= |E([R,S])|^2 / 4."""
    _check_same_register(r.reg, s.reg)
    _check_same_register(r.reg, st.reg)
    lhs = variance(r, st) * variance(s, st)
    if r.site == s.site:
        comm = r.matrix @ s.matrix - s.matrix @ r.matrix
        red = st.reduced((r.site,))
        e = complex(np.trace(red @ comm))
    else:
        e = 0.0 + 0.0j  # disjoint sites commute exactly
    rhs = 0.25 * abs(e) ** 2
    return lhs, rhs


def haar_random_pure(reg: Register, seed: int) -> QuantumState:
    """Haar-distributed pure state, deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    d = reg.total_dim
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return QuantumState(reg, vector=z / np.linalg.norm(z))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian matrix (Gaussian entries), fuel for property checks."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + z.conj().T) / 2


def random_mixed(reg: Register, rng: np.random.Generator, rank: int | None = None) -> QuantumState:
    """Random full- or low-rank density matrix via a Gaussian Wishart factor."""
    d = reg.total_dim
    k = rank or d
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return QuantumState(reg, rho=m / np.trace(m).real)
