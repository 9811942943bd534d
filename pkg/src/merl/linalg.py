"""Dense complex linear algebra for composite finite-dimensional systems.

Everything here is a pure function on immutable values.  The Kronecker
convention is fixed once for the whole package: in ``kron(a, b)`` the first
factor owns the most significant block of the composite index, so basis
index ``i`` of the product decomposes as ``i = i_a * b.rows + i_b``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable

import numpy as np

HERMITICITY_TOL = 1e-10
GROUP_TOL_DEFAULT = 1e-9


@dataclass(frozen=True)
class Register:
    """Ordered list of subsystem dimensions defining a composite Hilbert space."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise ValueError("register needs at least one site")
        for i, d in enumerate(dims):
            if d < 2:
                raise ValueError(f"site {i} has dimension {d}; every site needs dim >= 2")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def check_site(self, site: int) -> int:
        if not 0 <= site < self.n_sites:
            raise ValueError(f"site {site} out of range for {self.n_sites}-site register")
        return site

    @classmethod
    def qubits(cls, n: int) -> "Register":
        return cls((2,) * n)

    @classmethod
    def qudits(cls, n: int, d: int) -> "Register":
        return cls((d,) * n)


def frozen(a: np.ndarray) -> np.ndarray:
    """Copy of `a` with the write flag cleared (shared-safe immutable value)."""
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = 1.0 + (np.abs(m).max() if m.size else 0.0)
    return float(np.abs(m - m.conj().T).max()) <= tol * scale


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor as the most significant block."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def embed(local_op: np.ndarray, site: int, reg: Register) -> np.ndarray:
    """Extend a single-site operator to the full register: I x .. x op x .. x I."""
    local_op = np.asarray(local_op, dtype=complex)
    reg.check_site(site)
    d = reg.dims[site]
    if local_op.shape != (d, d):
        raise ValueError(
            f"operator of shape {local_op.shape} does not fit site {site} with dim {d}"
        )
    left = int(np.prod(reg.dims[:site], initial=1))
    right = int(np.prod(reg.dims[site + 1:], initial=1))
    out = local_op
    if left > 1:
        out = np.kron(np.eye(left), out)
    if right > 1:
        out = np.kron(out, np.eye(right))
    return out


def partial_trace(m: np.ndarray, reg: Register, keep: Iterable[int]) -> np.ndarray:
    """Reduce an operator on the full register to the kept sites.

    The kept sites appear in their original relative order.  The trace is
    preserved: ``trace(result) == trace(m)``.
    """
    m = np.asarray(m, dtype=complex)
    keep_list = sorted({reg.check_site(int(s)) for s in keep})
    if not keep_list:
        raise ValueError("keep set must name at least one site")
    n = reg.n_sites
    d = reg.total_dim
    if m.shape != (d, d):
        raise ValueError(f"matrix of shape {m.shape} does not match register dim {d}")

    letters = string.ascii_letters
    if 2 * n > len(letters):
        raise ValueError("too many sites for dense partial trace")
    row = list(letters[:n])
    col = [letters[n + i] if i in keep_list else letters[i] for i in range(n)]
    out = [row[i] for i in keep_list] + [col[i] for i in keep_list]
    sub = "".join(row) + "".join(col) + "->" + "".join(out)
    reduced = np.einsum(sub, m.reshape(reg.dims + reg.dims))
    kd = int(np.prod([reg.dims[i] for i in keep_list]))
    return reduced.reshape(kd, kd)


def hermitian_eig_grouped(
    h: np.ndarray, group_tol: float = GROUP_TOL_DEFAULT
) -> list[tuple[float, np.ndarray]]:
    """Spectral decomposition with degenerate eigenvalues merged.

    Returns ``[(eigenvalue, projector), ...]`` sorted by descending eigenvalue.
    Eigenvalues closer than ``group_tol * (1 + spectral_radius)`` are merged
    into one entry whose projector spans the whole eigenspace, so degenerate
    spectra (identity blocks, embedded operators) yield a single outcome.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("input matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    radius = float(np.abs(w).max()) if w.size else 0.0
    tol = group_tol * (1.0 + radius)

    entries: list[tuple[float, np.ndarray]] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol:
            block = v[:, start:i]
            entries.append((float(w[start:i].mean()), block @ block.conj().T))
            start = i
    entries.reverse()
    return entries
