"""Perturbative eigenfrequency estimates and their comparison to the truth.

The eigenvalues of Omega(eps) are the system's eigenfrequencies.  For the
cyclic 3-mode model they admit perturbative estimates at three depths, built
from the coupling ratio W in {X, Y, Z} matched to the mode and the two
frequency gaps P, Q of the relabeled model:

    app0:  w' + W
    app1:  app0 + W^2/P - W^2/Q
    app2:  app1 + 2W^3/P^2 - 3W^3/(PQ) + 2W^3/Q^2
                + (10/3)W^4/P^3 - 10W^4/(P^2 Q) + 10W^4/(P Q^2)
                - (10/3)W^4/Q^3

with (P, Q) = (w3'-w1', w1'-w2') for mode 1 and the cyclic relabelings for
modes 3 and 2.  Estimates for modes 2 and 3 are literally the mode-1 formula
run on the cyclically relabeled model, which makes the relabeling identity
exact by construction.

True eigenfrequencies are matched to modes 1..3 by continuity in eps from
the uncoupled limit (nearest-assignment continuation with step <= 0.01),
because plain magnitude sorting swaps branches where curves cross.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import linalg
from .errors import NoTransition
from .threemode import ThreeModeModel, cyclic_view, effective_frequencies, omega_matrix, xyz

LEVELS = ("app0", "app1", "app2")

# Continuation step for eigenvalue branch tracking.
CONTINUATION_STEP = 0.01

# A mode counts as non-real when |Im| exceeds this times (1 + |lambda|).
IMAG_THRESHOLD = 1e-8

_TARGET_OF_MODE = {1: "psi1", 3: "psi3", 2: "psi2"}


@dataclass(frozen=True)
class EigenfrequencyReport:
    """True eigenfrequencies vs all nine estimates at one epsilon.

    abs_errors entries are |Re(true) - estimate| and are present only for
    modes whose true value is real; non-real modes carry None there.
    real_spectrum is True when all three modes are real.
    """

    epsilon: float
    true_values: tuple[complex, complex, complex]
    estimates: dict[str, tuple[float, float, float]]
    abs_errors: dict[str, tuple[float | None, float | None, float | None]]
    mode_real: tuple[bool, bool, bool]
    real_spectrum: bool

    def csv_rows(self) -> list[tuple]:
        """One row per mode: (epsilon, mode, true_re, true_im, app0, app1,
        app2, err0, err1, err2); missing errors surface as NaN."""
        rows = []
        for i in range(3):
            true = self.true_values[i]
            row = [self.epsilon, i + 1, true.real, true.imag]
            row += [self.estimates[level][i] for level in LEVELS]
            row += [
                err if (err := self.abs_errors[level][i]) is not None else math.nan
                for level in LEVELS
            ]
            rows.append(tuple(row))
        return rows


def estimate_increments(
    m: ThreeModeModel, which: int, up_to: str = "app2"
) -> tuple[float, float, float]:
    """(base+W, app1 increment, app2 increment) for the requested mode."""
    if which not in (1, 2, 3):
        raise ValueError(f"which must be 1, 2 or 3, got {which}")
    if up_to not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {up_to!r}")
    view, _ = cyclic_view(m, _TARGET_OF_MODE[which])
    w1, w2, w3 = effective_frequencies(view)
    w = xyz(view).X
    p = w3 - w1
    q = w1 - w2
    base = w1 + w
    inc1 = w**2 / p - w**2 / q
    inc2 = (
        2 * w**3 / p**2
        - 3 * w**3 / (p * q)
        + 2 * w**3 / q**2
        + (10.0 / 3.0) * w**4 / p**3
        - 10 * w**4 / (p**2 * q)
        + 10 * w**4 / (p * q**2)
        - (10.0 / 3.0) * w**4 / q**3
    )
    return base, inc1, inc2


def estimate(m: ThreeModeModel, which: int, level: str) -> float:
    """Perturbative estimate of eigenfrequency `which` at the given depth."""
    base, inc1, inc2 = estimate_increments(m, which)
    if level == "app0":
        return base
    if level == "app1":
        return base + inc1
    if level == "app2":
        return base + inc1 + inc2
    raise ValueError(f"level must be one of {LEVELS}, got {level!r}")


def matched_path(m: ThreeModeModel, eps_grid) -> np.ndarray:
    """Eigenvalues of Omega(eps) along eps_grid, matched by continuity.

    The grid is refined internally so no continuation step exceeds
    CONTINUATION_STEP.  Row j holds (lambda_1, lambda_2, lambda_3) at
    eps_grid[j], where branch mu starts at omega_mu at eps = 0.
    """
    eps_grid = [float(e) for e in eps_grid]
    if any(e < 0 for e in eps_grid) or eps_grid != sorted(eps_grid):
        raise ValueError("eps_grid must be sorted and non-negative")
    fine = [0.0]
    targets = {}
    for j, eps in enumerate(eps_grid):
        prev = fine[-1]
        if eps > prev:
            extra = int(math.ceil((eps - prev) / CONTINUATION_STEP))
            points = [prev + (eps - prev) * (i + 1) / extra for i in range(extra)]
            points[-1] = eps  # land on the target exactly
            fine.extend(points)
        targets.setdefault(eps, []).append(j)
    current = np.array(m.omega, dtype=complex)
    out = np.zeros((len(eps_grid), 3), dtype=complex)
    for j in targets.get(0.0, ()):
        out[j] = current
    for eps in fine[1:]:
        vals = np.array(linalg.eigenvalues(omega_matrix(m, eps)))
        best = min(
            permutations(range(3)),
            key=lambda p: sum(abs(vals[p[i]] - current[i]) for i in range(3)),
        )
        current = vals[list(best)]
        for j in targets.get(eps, ()):
            out[j] = current
    return out


def true_eigenfrequencies(
    m: ThreeModeModel, epsilon: float | None = None
) -> tuple[complex, complex, complex]:
    """Eigenvalues of Omega(eps), matched to modes 1..3 by continuity."""
    eps = m.epsilon if epsilon is None else float(epsilon)
    row = matched_path(m, [eps])[0]
    return (complex(row[0]), complex(row[1]), complex(row[2]))


def is_real_mode(value: complex) -> bool:
    return abs(value.imag) <= IMAG_THRESHOLD * (1.0 + abs(value))


def _spectrum_nonreal(m: ThreeModeModel, eps: float) -> bool:
    vals = linalg.eigenvalues(omega_matrix(m, eps))
    return any(not is_real_mode(v) for v in vals)


def transition_epsilon(
    m: ThreeModeModel, eps_lo: float, eps_hi: float, tol: float = 1e-3
) -> float:
    """Onset of non-real eigenfrequencies, bisected to within tol.

    Raises:
        NoTransition: spectrum reality is the same at both bracket ends.
        ValueError: empty or inverted bracket.
    """
    if not eps_lo < eps_hi:
        raise ValueError(f"need eps_lo < eps_hi, got [{eps_lo}, {eps_hi}]")
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo_nonreal = _spectrum_nonreal(m, eps_lo)
    hi_nonreal = _spectrum_nonreal(m, eps_hi)
    if lo_nonreal == hi_nonreal:
        state = "non-real" if lo_nonreal else "real"
        raise NoTransition(f"spectrum is {state} at both bracket ends")
    lo, hi = eps_lo, eps_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _spectrum_nonreal(m, mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def report(m: ThreeModeModel, eps: float) -> EigenfrequencyReport:
    """All nine estimates, the matched true values, and per-mode errors."""
    at_eps = m.at_epsilon(eps)
    true_vals = true_eigenfrequencies(at_eps)
    mode_real = tuple(is_real_mode(v) for v in true_vals)
    estimates = {}
    abs_errors = {}
    for level in LEVELS:
        ests = tuple(estimate(at_eps, which, level) for which in (1, 2, 3))
        estimates[level] = ests
        abs_errors[level] = tuple(
            abs(true_vals[i].real - ests[i]) if mode_real[i] else None
            for i in range(3)
        )
    return EigenfrequencyReport(
        epsilon=eps,
        true_values=true_vals,
        estimates=estimates,
        abs_errors=abs_errors,
        mode_real=mode_real,
        real_spectrum=all(mode_real),
    )
