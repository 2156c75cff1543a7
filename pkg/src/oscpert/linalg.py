"""Dense complex linear algebra for small matrices.

Everything downstream (time-ordered expansions, eigenfrequency matching,
series resummation checks) is validated against the three operations here:
eigenvalues, the unitary-style propagator exp(-i*M*t) applied to a vector,
and the principal matrix square root.

Matrices and vectors are plain numpy arrays (complex128 internally).  All
operations are pure functions of their value inputs and never mutate them,
so results are safe to share across threads.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import (
    DimensionMismatch,
    NonConvergence,
    NotDiagonalizable,
    SingularTransform,
)

# Pade-13 numerator coefficients and the matching 1-norm threshold for
# scaling-and-squaring (Higham 2005 constants, double precision).
_PADE13_B = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_PADE13_THETA = 5.371920351148152

# Eigenvector condition-number cap above which a matrix is treated as not
# diagonalizable for square-root purposes.
DIAGONALIZABILITY_CAP = 1e8


def as_square_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and return ``m`` as a square complex128 array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_vector(v, n: int | None = None, name: str = "vector") -> np.ndarray:
    """Validate and return ``v`` as a complex128 vector of length ``n``."""
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"{name} has length {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _check_finite_result(arr: np.ndarray, context: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise ArithmeticError(f"non-finite values produced by {context}")
    return arr


def eigenvalues(m, tol: float = 1e-10) -> list[complex]:
    """All eigenvalues of a square matrix, with algebraic multiplicity.

    Returned unsorted.  For dimension <= 3 the result is additionally checked
    against the characteristic polynomial: each root must satisfy
    |p(lam)| <= tol * scale, where scale is a norm-based magnitude bound.

    Raises:
        NonConvergence: if the underlying QR iteration fails, or the
            characteristic-polynomial residual check fails for n <= 3.
    """
    arr = as_square_matrix(m)
    if not tol > 0:
        raise ValueError("tol must be positive")
    try:
        vals = np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NonConvergence(f"eigenvalue iteration failed: {exc}") from exc
    _check_finite_result(vals, "eigenvalues")
    n = arr.shape[0]
    if n <= 3:
        coeffs = _charpoly_coeffs(arr)
        scale = max(1.0, float(np.linalg.norm(arr))) ** n
        for lam in vals:
            residual = abs(np.polyval(coeffs, lam))
            if residual > tol * scale:
                raise NonConvergence(
                    f"eigenvalue {lam} has characteristic residual {residual:.3e} "
                    f"above {tol:.1e} * {scale:.3e}"
                )
    return [complex(v) for v in vals]


def _charpoly_coeffs(arr: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients (monic, highest power first)
    for n <= 3, assembled from trace / principal minors / determinant."""
    n = arr.shape[0]
    if n == 1:
        return np.array([1.0, -arr[0, 0]])
    if n == 2:
        tr = arr[0, 0] + arr[1, 1]
        det = arr[0, 0] * arr[1, 1] - arr[0, 1] * arr[1, 0]
        return np.array([1.0, -tr, det])
    tr = np.trace(arr)
    minors = 0.0 + 0.0j
    for i in range(3):
        idx = [j for j in range(3) if j != i]
        sub = arr[np.ix_(idx, idx)]
        minors += sub[0, 0] * sub[1, 1] - sub[0, 1] * sub[1, 0]
    det = (
        arr[0, 0] * (arr[1, 1] * arr[2, 2] - arr[1, 2] * arr[2, 1])
        - arr[0, 1] * (arr[1, 0] * arr[2, 2] - arr[1, 2] * arr[2, 0])
        + arr[0, 2] * (arr[1, 0] * arr[2, 1] - arr[1, 1] * arr[2, 0])
    )
    return np.array([1.0, -tr, minors, -det])


def _expm_pade13(a: np.ndarray) -> np.ndarray:
    """exp(a) via scaling-and-squaring with a degree-13 Pade approximant."""
    n = a.shape[0]
    norm = float(np.linalg.norm(a, 1))
    squarings = 0
    if norm > _PADE13_THETA:
        squarings = max(0, int(math.ceil(math.log2(norm / _PADE13_THETA))))
        a = a / (2.0**squarings)
    b = _PADE13_B
    ident = np.eye(n, dtype=complex)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (
        a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
        + b[7] * a6
        + b[5] * a4
        + b[3] * a2
        + b[1] * ident
    )
    v = (
        a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
        + b[6] * a6
        + b[4] * a4
        + b[2] * a2
        + b[0] * ident
    )
    try:
        result = np.linalg.solve(v - u, v + u)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological input
        raise NonConvergence(f"Pade solve failed: {exc}") from exc
    for _ in range(squarings):
        result = result @ result
    return result


def propagator(m, t: float) -> np.ndarray:
    """The full matrix exp(-1j * m * t).

    Diagonal inputs short-circuit to an entrywise exponential, which keeps
    the unperturbed-mode evolution exact to rounding.
    """
    arr = as_square_matrix(m)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    diag = np.diag(np.diag(arr))
    if np.array_equal(arr, diag):
        return np.diag(np.exp(-1j * np.diag(arr) * t))
    return _check_finite_result(_expm_pade13(-1j * arr * t), "propagator")


def matrix_exponential_apply(m, t: float, v) -> np.ndarray:
    """Apply the propagator exp(-1j * m * t) to a vector.

    Raises:
        DimensionMismatch: if the vector length differs from the matrix size.
    """
    arr = as_square_matrix(m)
    vec = as_vector(v, arr.shape[0])
    return propagator(arr, t) @ vec


def principal_sqrt(m, tol: float = 1e-10) -> np.ndarray:
    """Principal square root S of a diagonalizable matrix, S @ S == m.

    Eigenvalues of S sit on the principal branch: nonnegative real part,
    and the +i branch for negative-real eigenvalues of m.  The reconstruction
    residual ||S@S - m|| <= tol * ||m|| is asserted before returning.

    Raises:
        NotDiagonalizable: eigenvector condition number above the cap, or
            residual check failure.
        SingularTransform: eigenvector matrix not invertible.
    """
    arr = as_square_matrix(m)
    if not tol > 0:
        raise ValueError("tol must be positive")
    w, vecs = np.linalg.eig(arr)
    cond = np.linalg.cond(vecs)
    if not np.isfinite(cond) or cond > DIAGONALIZABILITY_CAP:
        raise NotDiagonalizable(
            f"eigenvector condition number {cond:.3e} exceeds cap "
            f"{DIAGONALIZABILITY_CAP:.1e}"
        )
    roots = np.sqrt(w.astype(complex))
    try:
        s = vecs @ np.diag(roots) @ np.linalg.inv(vecs)
    except np.linalg.LinAlgError as exc:
        raise SingularTransform(f"eigenvector matrix not invertible: {exc}") from exc
    norm_m = float(np.linalg.norm(arr))
    residual = float(np.linalg.norm(s @ s - arr))
    if residual > tol * max(norm_m, 1e-30):
        raise NotDiagonalizable(
            f"square-root residual {residual:.3e} above tol*||m|| = "
            f"{tol * norm_m:.3e}"
        )
    return s
