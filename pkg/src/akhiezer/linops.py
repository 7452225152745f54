"""Operator abstraction, deterministic test-problem generators, and dense
oracles.

The generators reproduce the paper-style experiments: diagonal matrices with
eigenvalues spread uniformly over a band system, their orthogonally
conjugated and Gaussian-perturbed relatives (with the true spectrum returned
for oracle use), and the preconditioned indefinite boundary-value problem.
Dense solves and eigendecompositions wrap LAPACK and exist purely as
cross-checks at desk scale.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.io

from .bands import BandSystem


class LinearOperator:
    """Matrix action x -> Ax with optional dense materialization.

    ``apply`` must be deterministic and linear; it receives one vector of
    shape (n,) or a block of columns of shape (n, m).
    """

    def __init__(self, n: int, apply, dense: np.ndarray | None = None):
        self.n = int(n)
        self._apply = apply
        self._dense = dense

    @classmethod
    def from_dense(cls, M) -> "LinearOperator":
        M = np.asarray(M)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("need a square matrix")
        if not np.all(np.isfinite(M)):
            raise ValueError("matrix entries must be finite")
        return cls(M.shape[0], lambda v: M @ v, dense=M)

    def __matmul__(self, v):
        return self._apply(v)

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        return self._apply(np.eye(self.n))

    @property
    def dense(self):
        return self._dense

    def is_real(self) -> bool:
        if self._dense is not None:
            return not np.iscomplexobj(self._dense)
        probe = self._apply(np.ones(self.n))
        return not np.iscomplexobj(probe)


def proportional_counts(total: int, weights, minimum: int = 0) -> list[int]:
    """Split ``total`` proportionally to ``weights`` by largest remainder."""
    weights = np.asarray(weights, dtype=float)
    raw = total * weights / weights.sum()
    counts = np.maximum(np.floor(raw).astype(int), minimum)
    short = total - counts.sum()
    if short < 0:
        raise ValueError("total too small for the per-part minimum")
    remainders = raw - np.floor(raw)
    for i in np.argsort(-remainders)[:short]:
        counts[i] += 1
    return counts.tolist()


def uniform_band_eigenvalues(n: int, bands: BandSystem, counts=None) -> np.ndarray:
    """Eigenvalues equispaced per band, endpoints included."""
    if counts is None:
        counts = proportional_counts(n, bands.widths, minimum=2)
    if sum(counts) != n:
        raise ValueError(f"counts {counts} do not sum to n={n}")
    return np.concatenate(
        [np.linspace(a, b, c) for (a, b), c in zip(bands.bands, counts)]
    )


def gen_uniform_diag(n: int, bands: BandSystem, counts=None) -> LinearOperator:
    """Diagonal operator with eigenvalues spread uniformly over the bands."""
    diag = uniform_band_eigenvalues(n, bands, counts)
    M = np.diag(diag)
    return LinearOperator.from_dense(M)


def gen_perturbed(n: int, bands: BandSystem, sigma: float, seed: int, counts=None):
    """Symmetric matrix with Gaussian-perturbed band spectrum.

    Uniform per-band eigenvalues receive N(0, sigma^2) jitter and the
    diagonal structure is removed by conjugating with the orthogonal factor
    of a seeded Gaussian matrix. Returns the operator and the exact
    eigenvalues for oracle use.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    lam = uniform_band_eigenvalues(n, bands, counts) + rng.normal(0.0, sigma, n)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    M = (Q * lam) @ Q.T
    M = 0.5 * (M + M.T)
    return LinearOperator.from_dense(M), lam


def bvp_system(n_grid: int = 100):
    """Preconditioned discretization of -u'' - 30 e^x u = x on (0,1) with
    homogeneous Dirichlet data.

    Centered differences on ``n_grid`` interior points (spacing
    1/(n_grid+1)); the preconditioner L is the same discretization of -u''.
    Returns (operator applying L^{-1}A, right-hand side L^{-1}b, dense A,
    dense L). L^{-1} acts through a prefactorized banded solve.
    """
    if n_grid < 3:
        raise ValueError("need at least 3 grid points")
    n = n_grid
    h = 1.0 / (n + 1)
    x = np.arange(1, n + 1) * h
    L = (
        np.diag(np.full(n, 2.0))
        + np.diag(np.full(n - 1, -1.0), 1)
        + np.diag(np.full(n - 1, -1.0), -1)
    ) / h**2
    A = L - 30.0 * np.diag(np.exp(x))
    b = x.copy()

    ab = np.zeros((3, n))
    ab[0, 1:] = -1.0 / h**2
    ab[1, :] = 2.0 / h**2
    ab[2, :-1] = -1.0 / h**2

    def apply(v):
        return scipy.linalg.solve_banded((1, 1), ab, A @ v)

    op = LinearOperator(n, apply)
    rhs = scipy.linalg.solve_banded((1, 1), ab, b)
    return op, rhs, A, L


def read_matrix_market(path) -> LinearOperator:
    """Operator from a Matrix Market coordinate or array file."""
    M = scipy.io.mmread(path)
    if hasattr(M, "toarray"):
        M = M.toarray()
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{path}: expected a square matrix")
    return LinearOperator.from_dense(M)


def dense_solve(A, b) -> np.ndarray:
    """LU solve with partial pivoting (oracle)."""
    M = A.to_dense() if isinstance(A, LinearOperator) else np.asarray(A)
    return scipy.linalg.solve(M, np.asarray(b))


def dense_eig(A, vectors: bool = False):
    """Eigendecomposition oracle; symmetric input routes through the
    symmetric solver."""
    M = A.to_dense() if isinstance(A, LinearOperator) else np.asarray(A)
    sym = not np.iscomplexobj(M) and np.allclose(M, M.T, atol=1e-12 * abs(M).max())
    if sym:
        return scipy.linalg.eigh(M) if vectors else scipy.linalg.eigvalsh(M)
    return scipy.linalg.eig(M) if vectors else scipy.linalg.eigvals(M)
