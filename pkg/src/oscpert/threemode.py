"""Three coupled oscillation modes with cyclic influence 1 -> 2 -> 3 -> 1.

The model is the 3x3 system i * dpsi/dt = Omega(eps) psi with

    Omega(eps) = diag(w1', w2', w3') + eps * [[0, 0, -a3],
                                              [-a1, 0, 0],
                                              [0, -a2, 0]],

where w_mu' = w_mu + eps * d_mu are the effective frequencies.  Component mu
is driven by its upstream neighbor in the cycle (1 by 3 through a3, 2 by 1
through a1, 3 by 2 through a2); the matrix with the reversed cycle is the
transpose and has an identical spectrum, so every spectral quantity below is
orientation-free.  Only the +i d/dt sign branch is implemented: solutions of
the -i branch are the complex conjugates of these.

The expansion of psi_1(t) in powers of eps has closed forms at orders 0..3,
and the full series regroups into nine infinite sums (blocks A1, A3, A2,
B1, B3, B2, C1, C3, C2) built from the cyclic coupling ratios

    X = a1 a2 a3 eps^3 / ((w1'-w2') (w3'-w1'))
    Y = a1 a2 a3 eps^3 / ((w2'-w3') (w3'-w1'))
    Z = a1 a2 a3 eps^3 / ((w1'-w2') (w2'-w3'))

with 2F2 hypergeometric inner sums.  Solutions for psi_3 and psi_2 follow by
the cyclic relabeling 1 -> 3 -> 2 -> 1 (with X -> Y -> Z -> X), exposed as
cyclic_view.  All denominators assume pairwise-distinct effective
frequencies; degenerate models are refused rather than regularized.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .dyson import PerturbedSystem
from .errors import (
    DegenerateFrequencies,
    InvalidLowerParameter,
    MaxTermsExceeded,
    TruncationNotConverged,
)

# Degeneracy refusal gap, as a fraction of the largest effective frequency.
DEGENERACY_GAP_FACTOR = 1e-6

BLOCK_NAMES = ("A1", "A3", "A2", "B1", "B3", "B2", "C1", "C3", "C2")
TARGETS = ("psi1", "psi3", "psi2")

# Relabeling rows of the cyclic substitution 1 -> 3 -> 2 -> 1: position mu of
# the relabeled model takes the original subscript _SUBSCRIPT_ROWS[target][mu].
_SUBSCRIPT_ROWS = {"psi1": (1, 2, 3), "psi3": (3, 1, 2), "psi2": (2, 3, 1)}


@dataclass(frozen=True)
class ThreeModeModel:
    """Parameters (w, a, d, eps) of the cyclically coupled 3-mode system."""

    omega: tuple[float, float, float]
    a: tuple[float, float, float]
    d: tuple[float, float, float]
    epsilon: float

    def __post_init__(self):
        for name in ("omega", "a", "d"):
            vals = tuple(float(x) for x in getattr(self, name))
            if len(vals) != 3:
                raise ValueError(f"{name} must have exactly 3 entries")
            if not all(math.isfinite(x) for x in vals):
                raise ValueError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, vals)
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")

    def at_epsilon(self, epsilon: float) -> "ThreeModeModel":
        return replace(self, epsilon=float(epsilon))

    def to_json_dict(self) -> dict:
        return {
            "omega": list(self.omega),
            "a": list(self.a),
            "d": list(self.d),
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ThreeModeModel":
        return cls(
            omega=tuple(data["omega"]),
            a=tuple(data["a"]),
            d=tuple(data["d"]),
            epsilon=float(data.get("epsilon", 0.0)),
        )


@dataclass(frozen=True)
class XYZ:
    """Cyclic coupling ratios; the small parameters of the expansion."""

    X: float
    Y: float
    Z: float


@dataclass(frozen=True)
class SeriesTruncation:
    """Truncation policy for the block sums.

    k_max caps the outer shell index; tail_tol is the relative tolerance for
    the inner hypergeometric sums (a term is negligible when three
    consecutive terms fall below tail_tol relative to the partial sum);
    max_terms_per_hyp caps the inner summation length.
    """

    k_max: int = 4
    tail_tol: float = 1e-12
    max_terms_per_hyp: int = 500

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")
        if self.max_terms_per_hyp < 1:
            raise ValueError("max_terms_per_hyp must be >= 1")


def effective_frequencies(m: ThreeModeModel) -> tuple[float, float, float]:
    """(w1', w2', w3') with w_mu' = w_mu + eps * d_mu.

    Raises:
        DegenerateFrequencies: if any pairwise gap is below the configured
            fraction of the largest effective frequency.
    """
    freqs = tuple(w + m.epsilon * d for w, d in zip(m.omega, m.d))
    gap = DEGENERACY_GAP_FACTOR * max(1e-12, max(abs(f) for f in freqs))
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(freqs[i] - freqs[j]) < gap:
                raise DegenerateFrequencies(
                    f"effective frequencies {i + 1} and {j + 1} differ by "
                    f"{abs(freqs[i] - freqs[j]):.3e}, below gap {gap:.3e}"
                )
    return freqs


def omega_matrix(m: ThreeModeModel, epsilon: float | None = None) -> np.ndarray:
    """Full system matrix Omega(eps) as a real 3x3 array."""
    eps = m.epsilon if epsilon is None else float(epsilon)
    a1, a2, a3 = m.a
    mat = np.diag([w + eps * d for w, d in zip(m.omega, m.d)]).astype(float)
    mat[0, 2] = -eps * a3
    mat[1, 0] = -eps * a1
    mat[2, 1] = -eps * a2
    return mat


def coupling_matrix(m: ThreeModeModel) -> np.ndarray:
    """Off-diagonal coupling (the eps-linear part without the d shifts)."""
    a1, a2, a3 = m.a
    return np.array([[0.0, 0.0, -a3], [-a1, 0.0, 0.0], [0.0, -a2, 0.0]])


def perturbed_system(m: ThreeModeModel) -> PerturbedSystem:
    """The model as a diagonal-plus-perturbation system at its epsilon.

    The d-shifts ride inside the effective frequencies, so the perturbation
    is purely off-diagonal and the expansion weight is epsilon itself.
    """
    return PerturbedSystem(
        omega0=effective_frequencies(m),
        omegaI=coupling_matrix(m),
        epsilon=m.epsilon,
    )


def xyz(m: ThreeModeModel) -> XYZ:
    """The coupling ratios X, Y, Z of the model at its epsilon."""
    w1, w2, w3 = effective_frequencies(m)
    num = m.a[0] * m.a[1] * m.a[2] * m.epsilon**3
    return XYZ(
        X=num / ((w1 - w2) * (w3 - w1)),
        Y=num / ((w2 - w3) * (w3 - w1)),
        Z=num / ((w1 - w2) * (w2 - w3)),
    )


def cyclic_view(
    m: ThreeModeModel, target: str
) -> tuple[ThreeModeModel, tuple[int, int, int]]:
    """Relabeled model whose psi_1 machinery yields the target component.

    Returns the relabeled model and the index map: entry mu-1 of the map is
    the original 1-based mode that plays role mu in the view.  For psi3 the
    map is (3, 1, 2); xyz(view).X equals Y of the original model.
    """
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}, got {target!r}")
    row = _SUBSCRIPT_ROWS[target]
    idx = tuple(r - 1 for r in row)
    view = ThreeModeModel(
        omega=tuple(m.omega[i] for i in idx),
        a=tuple(m.a[i] for i in idx),
        d=tuple(m.d[i] for i in idx),
        epsilon=m.epsilon,
    )
    return view, row


def psi1_analytic(m: ThreeModeModel, n: int, t: float, psi0) -> complex:
    """Closed-form term eps^n psi_1^(n)(t) for n in {0, 1, 2, 3}.

    The order-n term multiplies the initial component that starts the
    n-step cyclic path ending at mode 1: psi_1(0) for n in {0, 3},
    psi_3(0) for n = 1, psi_2(0) for n = 2.
    """
    if n not in (0, 1, 2, 3):
        raise ValueError("closed forms exist for orders 0..3 only")
    vec = linalg.as_vector(psi0, 3, "psi0")
    w1, w2, w3 = effective_frequencies(m)
    a1, a2, a3 = m.a
    eps = m.epsilon
    e1 = cmath.exp(-1j * w1 * t)
    e2 = cmath.exp(-1j * w2 * t)
    e3 = cmath.exp(-1j * w3 * t)
    if n == 0:
        return e1 * vec[0]
    if n == 1:
        return eps * a3 * (e1 - e3) / (w3 - w1) * vec[2]
    if n == 2:
        return (
            eps**2
            * a2
            * a3
            / (w3 - w1)
            * ((e2 - e3) / (w2 - w3) - (e1 - e2) / (w1 - w2))
            * vec[1]
        )
    p12 = w1 - w2
    p31 = w3 - w1
    p23 = w2 - w3
    coeff = eps**3 * a1 * a2 * a3
    return (
        coeff
        * (
            e1 / (p12 * p31**2)
            - e1 / (p12**2 * p31)
            - 1j * t * e1 / (p12 * p31)
            - e2 / (p12**2 * p23)
            + e3 / (p31**2 * p23)
        )
        * vec[0]
    )


def pochhammer(x: float, k: int) -> float:
    """Rising factorial (x)_k = x (x+1) ... (x+k-1), with (x)_0 = 1."""
    out = 1.0
    for i in range(k):
        out *= x + i
    return out


def neg_binomial(n: int, k: int) -> int:
    """Binomial coefficient extended to negative integer arguments.

    For n >= 0 this is the usual C(n, k) (zero outside 0 <= k <= n).  For
    n < 0 the nonzero regions are k >= 0, where
    C(n, k) = (-1)^k C(k - n - 1, k), and k <= n, where
    C(n, k) = (-1)^(n-k) C(-k - 1, n - k); everything else is zero.
    """
    n = int(n)
    k = int(k)
    if n >= 0:
        if 0 <= k <= n:
            return math.comb(n, k)
        return 0
    if k >= 0:
        return (-1) ** k * math.comb(k - n - 1, k)
    if k <= n:
        return (-1) ** (n - k) * math.comb(-k - 1, n - k)
    return 0


def _hyp_series(
    uppers: list[float],
    lowers: list[float],
    z: complex,
    trunc: SeriesTruncation,
    max_ell: int | None = None,
) -> complex:
    """Shared summation core: adaptive when max_ell is None, else the exact
    partial sum of terms 0..max_ell."""
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    small_streak = 0
    limit = trunc.max_terms_per_hyp if max_ell is None else max_ell
    for ell in range(limit):
        num = 1.0
        for a in uppers:
            num *= a + ell
        if num == 0.0:
            return total  # a non-positive upper parameter: series terminated
        den = 1.0
        for b in lowers:
            den *= b + ell
        if den == 0.0:
            raise InvalidLowerParameter(
                f"lower parameter hits zero at term {ell} for b={lowers}"
            )
        term = term * (num / den) * z / (ell + 1)
        total += term
        if max_ell is not None:
            continue
        if abs(term) < trunc.tail_tol * abs(total) or abs(term) < 1e-300:
            small_streak += 1
            if small_streak >= 3:
                return total
        else:
            small_streak = 0
    if max_ell is None:
        raise MaxTermsExceeded(
            f"no convergence within {trunc.max_terms_per_hyp} terms",
            partial=total,
            last_term=term,
        )
    return total


def hyp_pfq(a_params, b_params, z: complex, trunc: SeriesTruncation) -> complex:
    """Generalized hypergeometric series pFq(a; b; z).

    Exactly matching upper/lower parameter pairs cancel before summation
    (so e.g. 2F2(a, b; a, b; z) reduces to exp(z) and 2F2(1, 0; 0, 1; z)
    likewise).  A remaining non-positive-integer upper parameter terminates
    the series (polynomial case).  Terms accumulate until three consecutive
    ones fall below tail_tol relative to the partial sum.

    Raises:
        InvalidLowerParameter: a surviving lower parameter hits a
            non-positive integer before the series terminates.
        MaxTermsExceeded: no convergence within max_terms_per_hyp terms.
    """
    uppers, lowers = _cancel_params(a_params, b_params)
    return _hyp_series(uppers, lowers, complex(z), trunc)


def _cancel_params(a_params, b_params) -> tuple[list[float], list[float]]:
    uppers = [float(a) for a in a_params]
    lowers = [float(b) for b in b_params]
    for a in list(uppers):
        if a in lowers:
            uppers.remove(a)
            lowers.remove(a)
    return uppers, lowers


# Block definitions.  Each cell (k, l) of a block is
#   sign * prefactor * (ratio1 ** k) * (ratio2 ** l) * C(b1t, b1b) * C(b2t, b2b)
#     * 2F2(u1, u2; lo1, lo2; -1j * W * t)
# where W is the block's coupling ratio and the integer parameters depend on
# (k, l) as tabulated below.  B1, C1, C3 start at k = 1 and stop l at k - 1.


def _block_spec(m: ThreeModeModel, block: str):
    w1, w2, w3 = effective_frequencies(m)
    ratios = xyz(m)
    p12, p31, p23 = w1 - w2, w3 - w1, w2 - w3
    a1, a2, a3 = m.a
    eps = m.epsilon
    if block in ("A1", "A3", "A2"):
        w_ratio, denom_pow, denom_ratio = ratios.X, p31, p31 / p12
    elif block in ("B1", "B3", "B2"):
        w_ratio, denom_pow, denom_ratio = ratios.Y, p31, p31 / p23
    else:
        w_ratio, denom_pow, denom_ratio = ratios.Z, p12, p12 / p23
    spec = {
        "W": w_ratio,
        "ratio1": w_ratio / denom_pow,
        "ratio2": denom_ratio,
        "k_start": 1 if block in ("B1", "C1", "C3") else 0,
        "l_excludes_k": block in ("B1", "C1", "C3"),
    }
    if block == "A1":
        spec.update(prefactor=1.0, sign=lambda k, l: (-1) ** l)
        spec.update(binoms=lambda k, l: ((2 * k - l - 1, k - l), (k + l - 1, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l, k + l), (k, k)))
    elif block == "A3":
        spec.update(prefactor=a3 * eps / p31, sign=lambda k, l: (-1) ** l)
        spec.update(binoms=lambda k, l: ((2 * k - l, k - l), (k + l - 1, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l + 1, k + l), (k, k + 1)))
    elif block == "A2":
        spec.update(
            prefactor=a2 * a3 * eps**2 / (p12 * p31),
            sign=lambda k, l: (-1) ** (l + 1),
        )
        spec.update(binoms=lambda k, l: ((2 * k - l, k - l), (k + l, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l + 1, k + l + 1), (k + 1, k + 1)))
    elif block == "B1":
        spec.update(prefactor=1.0, sign=lambda k, l: (-1) ** (k + l + 1))
        spec.update(binoms=lambda k, l: ((2 * k - l - 1, k - l - 1), (k + l - 1, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l, k + l), (k, k + 1)))
    elif block == "B3":
        spec.update(
            prefactor=a3 * eps / p31, sign=lambda k, l: (-1) ** (k + l + 1)
        )
        spec.update(binoms=lambda k, l: ((2 * k - l, k - l), (k + l - 1, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l + 1, k + l), (k, k + 1)))
    elif block == "B2":
        spec.update(
            prefactor=a2 * a3 * eps**2 / (p23 * p31),
            sign=lambda k, l: (-1) ** (k + l + 1),
        )
        spec.update(binoms=lambda k, l: ((2 * k - l, k - l), (k + l, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l + 1, k + l + 1), (k + 1, k + 1)))
    elif block == "C1":
        spec.update(prefactor=1.0, sign=lambda k, l: (-1) ** (l + 1))
        spec.update(binoms=lambda k, l: ((2 * k - l - 1, k - l - 1), (k + l - 1, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l, k + l), (k, k + 1)))
    elif block == "C3":
        spec.update(prefactor=a3 * eps / p23, sign=lambda k, l: (-1) ** l)
        spec.update(binoms=lambda k, l: ((2 * k - l - 1, k - l - 1), (k + l, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l, k + l + 1), (k + 1, k + 1)))
    elif block == "C2":
        # sign alternates in l only; the (k+l)-alternation used by the
        # B-family contradicts the order-5 expansion and breaks the t=0
        # recombination identity here.
        spec.update(
            prefactor=a2 * a3 * eps**2 / (p12 * p23),
            sign=lambda k, l: (-1) ** (l + 1),
        )
        spec.update(binoms=lambda k, l: ((2 * k - l, k - l), (k + l, l)))
        spec.update(hyp=lambda k, l: ((2 * k - l + 1, k + l + 1), (k + 1, k + 1)))
    else:
        raise ValueError(f"unknown block {block!r}; expected one of {BLOCK_NAMES}")
    return spec


# Expansion order of the (k, inner-term ell) cell is 3*(k + ell) plus this
# per-block offset (which initial component the block multiplies).
_BLOCK_ORDER_OFFSET = {
    "A1": 0, "B1": 0, "C1": 0,
    "A3": 1, "B3": 1, "C3": 1,
    "A2": 2, "B2": 2, "C2": 2,
}


def series_block(
    m: ThreeModeModel,
    block: str,
    t: float,
    trunc: SeriesTruncation,
    shell_tol: float | None = None,
    order_cap: int | None = None,
) -> complex:
    """One of the nine infinite-sum blocks, truncated at trunc.k_max shells.

    A1 carries its series closure exp(-1j*X*t) - 1 in place of the
    ill-defined k = l = 0 hypergeometric cell (whose value is taken as 1).

    With order_cap set, every inner series is additionally cut so that no
    retained term exceeds total expansion order eps^order_cap; the block
    then holds exactly the expansion content of orders <= order_cap that
    fit inside k_max shells (used for truncation-equivalence studies
    against fixed-order quadrature sums).

    Raises:
        TruncationNotConverged: only when shell_tol is given and the last
            retained shell still contributes more than shell_tol relative
            to the accumulated sum (deliberate fixed-depth truncations pass
            shell_tol=None).
    """
    spec = _block_spec(m, block)
    offset = _BLOCK_ORDER_OFFSET[block]
    z = -1j * spec["W"] * t
    total = 0.0 + 0.0j
    last_shell = 0.0
    for k in range(spec["k_start"], trunc.k_max + 1):
        max_ell = None
        if order_cap is not None:
            max_ell = (order_cap - offset - 3 * k) // 3
            if max_ell < 0:
                continue
        shell = 0.0 + 0.0j
        l_stop = k - 1 if spec["l_excludes_k"] else k
        for l in range(0, l_stop + 1):
            if block == "A1" and k == 0:
                shell += 1.0
                continue
            (b1t, b1b), (b2t, b2b) = spec["binoms"](k, l)
            coeff = neg_binomial(b1t, b1b) * neg_binomial(b2t, b2b)
            if coeff == 0:
                continue
            uppers, lowers = _cancel_params(*spec["hyp"](k, l))
            cell = (
                spec["sign"](k, l)
                * spec["prefactor"]
                * spec["ratio1"] ** k
                * spec["ratio2"] ** l
                * coeff
                * _hyp_series(uppers, lowers, z, trunc, max_ell=max_ell)
            )
            shell += cell
        total += shell
        last_shell = abs(shell)
    if block == "A1":
        if order_cap is None:
            total += cmath.exp(z) - 1.0
        else:
            closure = 0.0 + 0.0j
            zpow = 1.0 + 0.0j
            for power in range(1, order_cap // 3 + 1):
                zpow *= z / power
                closure += zpow
            total += closure
    if shell_tol is not None and last_shell > shell_tol * max(abs(total), 1e-300):
        raise TruncationNotConverged(
            f"block {block}: shell k={trunc.k_max} still contributes "
            f"{last_shell:.3e} against total {abs(total):.3e}"
        )
    return total


def psi1_infinite(
    m: ThreeModeModel,
    t: float,
    psi0,
    trunc: SeriesTruncation,
    shell_tol: float | None = None,
    order_cap: int | None = None,
) -> complex:
    """psi_1(t) resummed to all orders through trunc.k_max shells.

    Assembles (A1 p1 + A3 p3 + A2 p2) e^{-i w1' t}
            + (B1 p1 + B3 p3 + B2 p2) e^{-i w3' t}
            + (C1 p1 + C3 p3 + C2 p2) e^{-i w2' t}
    with p_mu = psi_mu(0).
    """
    vec = linalg.as_vector(psi0, 3, "psi0")
    w1, w2, w3 = effective_frequencies(m)
    blocks = {
        name: series_block(m, name, t, trunc, shell_tol=shell_tol, order_cap=order_cap)
        for name in BLOCK_NAMES
    }
    p1, p2, p3 = vec[0], vec[1], vec[2]
    return (
        (blocks["A1"] * p1 + blocks["A3"] * p3 + blocks["A2"] * p2)
        * cmath.exp(-1j * w1 * t)
        + (blocks["B1"] * p1 + blocks["B3"] * p3 + blocks["B2"] * p2)
        * cmath.exp(-1j * w3 * t)
        + (blocks["C1"] * p1 + blocks["C3"] * p3 + blocks["C2"] * p2)
        * cmath.exp(-1j * w2 * t)
    )
