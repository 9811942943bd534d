"""Conditional variances under projective quantum control.

The central quantity is the expected conditional variance: the average,
over the outcomes of a control-side measurement, of the measured system's
post-measurement variance.  Unlike the single-outcome conditional variance
it can never exceed the unconditional variance (law of total variance),
and iterating it over an ordered chain of control measurements yields the
sequential form used by the resolution-line spectrum.

All outcome sequences are enumerated exhaustively with Lueders updates;
sequences whose joint probability falls below the pruning threshold
contribute zero and are tallied as pruned mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .states import (
    Observable,
    OutcomeBranch,
    PRUNE_TOL_DEFAULT,
    QuantumState,
    expectation,
    measure_branches,
    variance,
)


@dataclass(frozen=True, eq=False)
class ControlChain:
    """Measured site plus the ordered control observables acting on other sites."""

    measured_site: int
    controls: tuple[Observable, ...]

    def __post_init__(self):
        sites = [self.measured_site] + [o.site for o in self.controls]
        if len(set(sites)) != len(sites):
            raise ValueError(f"measured and control sites must be distinct, got {sites}")

    def prefix(self, m: int) -> tuple[Observable, ...]:
        if not 0 <= m <= len(self.controls):
            raise ValueError(f"prefix length {m} out of range")
        return self.controls[:m]


@dataclass(frozen=True, eq=False)
class SequenceLeaf:
    """One surviving outcome sequence: joint probability and resulting state."""

    probability: float
    state: QuantumState


def enumerate_sequences(
    controls: Sequence[Observable],
    s: QuantumState,
    prune_tol: float = PRUNE_TOL_DEFAULT,
) -> tuple[list[SequenceLeaf], float]:
    """All surviving outcome sequences for measuring `controls` in order.

    Returns the leaves (joint probability, post-sequence state) in a fixed
    depth-first order plus the total pruned probability mass.  Sequences are
    pruned as soon as their joint probability drops below `prune_tol`.
    """
    leaves: list[SequenceLeaf] = []
    pruned_mass = 0.0

    def walk(state: QuantumState, prob: float, depth: int) -> None:
        nonlocal pruned_mass
        if depth == len(controls):
            leaves.append(SequenceLeaf(prob, state))
            return
        for branch in measure_branches(controls[depth], state, prune_tol=prune_tol):
            joint = prob * branch.probability
            if branch.pruned or joint < prune_tol:
                pruned_mass += joint
                continue
            walk(branch.state, joint, depth + 1)

    walk(s, 1.0, 0)
    return leaves, pruned_mass


def cond_variance_given_outcome(q: Observable, branch: OutcomeBranch) -> float:
    """Variance of `q` given one specific measurement outcome on another site."""
    if branch.pruned or branch.state is None:
        raise ValueError("zero-probability condition: branch was pruned")
    return variance(q, branch.state)


def expected_cond_variance(
    q: Observable,
    o: Observable,
    s: QuantumState,
    prune_tol: float = PRUNE_TOL_DEFAULT,
) -> float:
    """Outcome-probability-weighted average of the post-measurement variance of `q`."""
    if q.site == o.site:
        raise ValueError(f"control and measured observables collide on site {q.site}")
    total = 0.0
    for branch in measure_branches(o, s, prune_tol=prune_tol):
        if branch.pruned:
            continue
        total += branch.probability * variance(q, branch.state)
    return total


def sequential_expected_cond_variance(
    q: Observable,
    controls: Sequence[Observable],
    s: QuantumState,
    prune_tol: float = PRUNE_TOL_DEFAULT,
) -> float:
    """Expected variance of `q` after measuring an ordered chain of controls.

    Enumerates every outcome sequence of the chain with Lueders updates and
    averages the leaf variance of `q` under the joint sequence probabilities.
    With a single control this reduces exactly to `expected_cond_variance`.
    """
    if not controls:
        raise ValueError("need at least one control observable")
    ControlChain(q.site, tuple(controls))
    leaves, _ = enumerate_sequences(controls, s, prune_tol=prune_tol)
    return sum(leaf.probability * variance(q, leaf.state) for leaf in leaves)


def variance_of_cond_expectation(
    q: Observable,
    o: Observable,
    s: QuantumState,
    prune_tol: float = PRUNE_TOL_DEFAULT,
) -> float:
    """Variance, over the outcomes of `o`, of the branch expectation of `q`."""
    if q.site == o.site:
        raise ValueError(f"control and measured observables collide on site {q.site}")
    mean = 0.0
    second = 0.0
    for branch in measure_branches(o, s, prune_tol=prune_tol):
        if branch.pruned:
            continue
        e = expectation(q, branch.state)
        mean += branch.probability * e
        second += branch.probability * e * e
    v = second - mean * mean
    return max(v, 0.0)


def nested_correction_term(
    q: Observable,
    target: Observable,
    priors: Sequence[Observable],
    s: QuantumState,
    prune_tol: float = PRUNE_TOL_DEFAULT,
) -> float:
    """Average over prior outcome sequences of the branch-conditional
    expectation variance against the target control.

    For each surviving sequence of the prior controls, take the variance of
    the conditional expectation of `q` over the target's outcomes on the
    branch state, then weight by the joint prior probability.  With no
    priors this is `variance_of_cond_expectation` itself.  The definition is
    pinned by the telescoping identity
    ``sequential(m-1) - sequential(m) == nested(target=C_m, priors=C_1..C_m-1)``.
    """
    ControlChain(q.site, tuple(priors) + (target,))
    if not priors:
        return variance_of_cond_expectation(q, target, s, prune_tol=prune_tol)
    leaves, _ = enumerate_sequences(priors, s, prune_tol=prune_tol)
    return sum(
        leaf.probability
        * variance_of_cond_expectation(q, target, leaf.state, prune_tol=prune_tol)
        for leaf in leaves
    )


def control_relation_residual(
    qs: Sequence[Observable],
    control_chains: Sequence[Sequence[Observable]],
    s: QuantumState,
    l_tra: float,
    prune_tol: float = PRUNE_TOL_DEFAULT,
) -> float:
    """LHS minus RHS of the multi-observable control-assisted relation.

    LHS is the sum over observables of the sequential expected conditional
    variance down the full chain; RHS subtracts from `l_tra` the first-control
    expectation-variance terms and every nested correction.  The relation
    asserts residual >= 0 (up to rounding); with `l_tra` equal to the sum of
    unconditional variances it is an identity and the residual vanishes.
    """
    if not qs:
        raise ValueError("need at least one observable")
    if len(qs) != len(control_chains):
        raise ValueError("one control chain per measured observable is required")
    lhs = 0.0
    rhs = l_tra
    for q, chain in zip(qs, control_chains):
        chain = tuple(chain)
        if not chain:
            raise ValueError("each control chain needs at least one control")
        lhs += sequential_expected_cond_variance(q, chain, s, prune_tol=prune_tol)
        rhs -= variance_of_cond_expectation(q, chain[0], s, prune_tol=prune_tol)
        for n in range(1, len(chain)):
            rhs -= nested_correction_term(
                q, chain[n], chain[:n], s, prune_tol=prune_tol
            )
    return lhs - rhs
