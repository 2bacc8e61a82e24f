"""Dense complex linear algebra on bipartite systems.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. A bipartite
vector |psi> in C^dA (x) C^dB is identified with the dA x dB matrix ``D``
whose row-major flattening is |psi>, i.e. ``vec(|i><j|) = |i>|j>``. Under
that identification

    <psi| A (x) B |psi> = tr(D^dagger A D B^T)

which is what :func:`bipartite_expectation` evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPSD, NotUnitVector

EPS = 1e-9


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a 2-d complex128 array (vectors become columns)."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {arr.shape}")
    return arr


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got array of shape {arr.shape}")
    return arr


# -- predicates ---------------------------------------------------------------


def is_hermitian(m, eps: float = EPS) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and np.linalg.norm(m - m.conj().T) <= eps


def is_psd(m, eps: float = EPS) -> bool:
    m = as_matrix(m)
    if not is_hermitian(m, eps):
        return False
    return bool(np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= -eps)


def is_projector(m, eps: float = EPS) -> bool:
    m = as_matrix(m)
    return is_hermitian(m, eps) and np.linalg.norm(m @ m - m) <= eps


def is_unit_vector(v, eps: float = EPS) -> bool:
    return abs(np.linalg.norm(as_vector(v)) - 1.0) <= eps


def projector_residual(m) -> float:
    """Frobenius norm of ``M^2 - M``."""
    m = as_matrix(m)
    return float(np.linalg.norm(m @ m - m))


# -- vec correspondence -------------------------------------------------------


def vec_map(m) -> np.ndarray:
    """Map a dA x dB matrix to the (dA*dB) x 1 column ``sum M_ij |i>|j>``."""
    m = as_matrix(m)
    return m.reshape(-1, 1).copy()


def unvec(v, d_a: int, d_b: int) -> np.ndarray:
    """Inverse of :func:`vec_map`."""
    v = as_vector(v)
    if v.size != d_a * d_b:
        raise DimensionMismatch(f"vector of length {v.size} is not {d_a}x{d_b}")
    return v.reshape(d_a, d_b).copy()


# -- bipartite states ---------------------------------------------------------


def maximally_entangled_state(d: int) -> np.ndarray:
    """|Psi_d> = d^{-1/2} sum_i |ii>, as a flat vector."""
    return (np.eye(d, dtype=np.complex128) / np.sqrt(d)).reshape(-1)


def reduced_states(psi, d_a: int, d_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(tr_B |psi><psi|, tr_A |psi><psi|)``."""
    mat = unvec(psi, d_a, d_b)
    rho_a = mat @ mat.conj().T
    rho_b = mat.T @ mat.conj()
    return rho_a, rho_b


def psd_sqrt(m) -> np.ndarray:
    m = as_matrix(m)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def bipartite_expectation(a, b, psi) -> complex:
    """<psi| A (x) B |psi> evaluated as tr(D^dagger A D B^T) with vec(D) = psi."""
    a = as_matrix(a)
    b = as_matrix(b)
    psi = as_vector(psi)
    if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise DimensionMismatch("operators must be square")
    d_a, d_b = a.shape[0], b.shape[0]
    if psi.size != d_a * d_b:
        raise DimensionMismatch(
            f"state of length {psi.size} does not fit operators of size {d_a} and {d_b}"
        )
    mat = psi.reshape(d_a, d_b)
    return complex(np.trace(mat.conj().T @ a @ mat @ b.T))


def support_projector(m, eps: float = EPS) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors of ``m`` with eigenvalue > eps."""
    m = as_matrix(m)
    if not is_psd(m, eps):
        raise NotPSD("support_projector needs a positive semidefinite matrix")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    keep = v[:, w > eps]
    return keep @ keep.conj().T


def commutator_norm(a, b) -> float:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"cannot commute {a.shape} with {b.shape}")
    return float(np.linalg.norm(a @ b - b @ a))


# -- Schmidt decomposition ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """psi = sum_i coefficients[i] * left_basis[:, i] (x) right_basis[:, i].

    ``root`` is D = sum_i lambda_i |alpha_i><alpha_i| = sqrt(tr_B |psi><psi|).
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    rank: int
    root: np.ndarray
    d_a: int
    d_b: int

    @property
    def full_schmidt_rank(self) -> bool:
        return self.d_a == self.d_b == self.rank

    def reconstruct(self) -> np.ndarray:
        mat = (self.left_basis * self.coefficients) @ self.right_basis.T
        return mat.reshape(-1)

    def uniform_state(self) -> np.ndarray:
        """(1/sqrt(r)) sum_{i<r} |alpha_i>|beta_i> over the nonzero coefficients."""
        r = self.rank
        mat = self.left_basis[:, :r] @ self.right_basis[:, :r].T / np.sqrt(r)
        return mat.reshape(-1)

    def classes(self, eps: float = EPS) -> list[list[int]]:
        """Group indices of equal coefficients (consecutive values within eps)."""
        groups: list[list[int]] = []
        for i, lam in enumerate(self.coefficients):
            if groups and abs(self.coefficients[groups[-1][-1]] - lam) <= eps:
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups


def schmidt_decompose(psi, d_a: int, d_b: int, eps: float = EPS) -> SchmidtDecomposition:
    """Schmidt decomposition through the SVD of the coefficient matrix.

    The phase of each left vector is fixed so that its first entry with
    modulus above ``eps`` is real positive; the right vector absorbs the
    conjugate phase so the product term is unchanged.
    """
    psi = as_vector(psi)
    if psi.size != d_a * d_b:
        raise DimensionMismatch(f"state of length {psi.size} is not {d_a}x{d_b}")
    if not is_unit_vector(psi, eps):
        raise NotUnitVector(f"state norm {np.linalg.norm(psi):.3g} differs from 1")
    mat = psi.reshape(d_a, d_b)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    # psi = sum_i s_i u_i (x) conj(vh_i)
    left = u.copy()
    right = vh.T.copy()
    for i in range(left.shape[1]):
        col = left[:, i]
        idx = np.flatnonzero(np.abs(col) > eps)
        if idx.size:
            ph = col[idx[0]] / abs(col[idx[0]])
            left[:, i] = col / ph
            right[:, i] = right[:, i] * ph
    rank = int(np.count_nonzero(s > eps))
    root = (left * s) @ left.conj().T
    return SchmidtDecomposition(
        coefficients=s,
        left_basis=left,
        right_basis=right,
        rank=rank,
        root=root,
        d_a=d_a,
        d_b=d_b,
    )
