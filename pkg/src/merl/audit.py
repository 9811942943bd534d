"""Randomized self-audit of the conditional-variance identities.

Runs the variance-reduction bound, the law of total variance, the
telescoping identity behind the line recursion, chain monotonicity and the
relation residual on Haar-random scenarios over mixed qubit/qutrit
registers.  Deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conditional import (
    control_relation_residual,
    expected_cond_variance,
    nested_correction_term,
    sequential_expected_cond_variance,
    variance_of_cond_expectation,
)
from .linalg import Register
from .states import (
    Observable,
    QuantumState,
    haar_random_pure,
    random_hermitian,
    random_mixed,
    variance,
)

REGISTER_CYCLE: tuple[tuple[int, ...], ...] = (
    (2, 2),
    (2, 3),
    (3, 3),
    (2, 2, 2),
    (2, 3, 2),
    (2, 2, 2, 2),
)

EQ_REDUCTION_TOL = 1e-9
TOTAL_VARIANCE_TOL = 1e-9
TELESCOPE_TOL = 1e-8
MONOTONE_TOL = 1e-9
RESIDUAL_TOL = 1e-8


@dataclass
class AuditReport:
    trials: int
    seed: int
    checks: dict[str, int] = field(default_factory=dict)
    failures: dict[str, int] = field(default_factory=dict)

    def record(self, name: str, ok: bool) -> None:
        self.checks[name] = self.checks.get(name, 0) + 1
        if not ok:
            self.failures[name] = self.failures.get(name, 0) + 1

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary_lines(self) -> list[str]:
        lines = [f"audit: {self.trials} trials, seed {self.seed}"]
        for name in sorted(self.checks):
            bad = self.failures.get(name, 0)
            good = self.checks[name] - bad
            status = "ok" if bad == 0 else "FAIL"
            lines.append(f"  {name}: {good}/{self.checks[name]} pass [{status}]")
        lines.append("audit result: " + ("all checks passed" if self.passed else "FAILURES"))
        return lines


def _trial_state(reg: Register, rng: np.random.Generator, trial: int) -> QuantumState:
    if trial % 4 == 3:
        return random_mixed(reg, rng)
    return haar_random_pure(reg, int(rng.integers(0, 2**31)))


def run_audit(trials: int = 500, seed: int = 0) -> AuditReport:
    """Run every identity check `trials` times over random scenarios."""
    rng = np.random.default_rng(seed)
    report = AuditReport(trials=trials, seed=seed)
    for trial in range(trials):
        dims = REGISTER_CYCLE[trial % len(REGISTER_CYCLE)]
        reg = Register(dims)
        state = _trial_state(reg, rng, trial)
        q = Observable(reg, 0, random_hermitian(dims[0], rng))
        controls = [
            Observable(reg, site, random_hermitian(dims[site], rng))
            for site in range(1, len(dims))
        ]

        v = variance(q, state)
        ecv = expected_cond_variance(q, controls[0], state)
        vce = variance_of_cond_expectation(q, controls[0], state)
        report.record("variance_reduction", ecv <= v + EQ_REDUCTION_TOL)
        report.record("law_of_total_variance", abs(v - ecv - vce) <= TOTAL_VARIANCE_TOL)

        seq_prev = ecv
        for m in range(2, len(controls) + 1):
            seq_m = sequential_expected_cond_variance(q, controls[:m], state)
            nested = nested_correction_term(q, controls[m - 1], controls[: m - 1], state)
            report.record("telescoping", abs(seq_prev - seq_m - nested) <= TELESCOPE_TOL)
            report.record("chain_monotonicity", seq_m <= seq_prev + MONOTONE_TOL)
            seq_prev = seq_m

        residual = control_relation_residual([q], [controls], state, l_tra=v)
        report.record("relation_equality", abs(residual) <= RESIDUAL_TOL)
        report.record("relation_lower_bound", residual >= -RESIDUAL_TOL)
    return report
