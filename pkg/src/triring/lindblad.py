"""Liouvillian construction, steady states, and a time-domain cross-check.

Vectorization is column-stacking throughout: vec(X) stacks the columns of
X, so vec(A X B) = (B^T kron A) vec(X).  With collapse operators C_k the
generator of d vec(rho)/dt = L vec(rho) is

    L = -i (I kron H - H^T kron I)
        + sum_k [ conj(C_k) kron C_k
                  - 1/2 I kron (C_k' C_k)
                  - 1/2 (C_k' C_k)^T kron I ].

The default steady-state solver replaces one Liouvillian row by the trace
functional and solves the resulting nonsingular sparse system with GMRES,
preconditioned by the exact inverse of the no-jump part of the generator
(a few dense D x D products per iteration).  A sparse direct
factorization of the same system is the automatic fallback, and a
null-space extraction is kept as an independent method.  ``evolve``
integrates the master equation in matrix form (never touching the
superoperator), providing a cross-check that shares no code path with
the algebraic solvers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    NoConvergenceError,
    NonPhysicalStateError,
    NonUniqueSteadyStateError,
    SpaceMismatchError,
    StepTooLargeError,
)
from .fock import CompositeSpace, Operator

__all__ = [
    "DensityMatrix",
    "Superoperator",
    "SteadyStateMethod",
    "SteadyStateOptions",
    "SolveDiagnostics",
    "vec",
    "unvec",
    "build_liouvillian",
    "trace_violation",
    "steady_state",
    "evolve",
]

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_FLOOR = -1e-8

# largest dense dimension (D^2) for which the null-space fallback uses an
# exact SVD; above this it switches to shift-inverted sparse eigenpairs
_DENSE_NULLSPACE_LIMIT = 4096


class SteadyStateMethod(Enum):
    TRACE_CONSTRAINED = "trace-constrained"
    NULL_SPACE = "null-space"


@dataclass(frozen=True)
class SteadyStateOptions:
    method: SteadyStateMethod = SteadyStateMethod.TRACE_CONSTRAINED
    residual_tol: float = 1e-10
    hermitize: bool = True

    def __post_init__(self):
        if self.residual_tol <= 0:
            raise ValueError(f"residual_tol must be > 0, got {self.residual_tol}")


@dataclass
class SolveDiagnostics:
    """Per-solve bookkeeping: residual and the corrections applied post-solve."""

    method: str
    residual: float
    residual_bound: float
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator on a space."""

    space: CompositeSpace
    data: np.ndarray = field(repr=False)
    diagnostics: SolveDiagnostics | None = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        d = self.space.dim
        if data.shape != (d, d):
            raise SpaceMismatchError(
                f"density matrix has shape {data.shape}, space dimension is {d}"
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(
        cls,
        space: CompositeSpace,
        data: np.ndarray,
        *,
        enforce: bool = True,
        diagnostics: SolveDiagnostics | None = None,
    ) -> "DensityMatrix":
        """Wrap an array, optionally hermitizing and renormalizing the trace."""
        data = np.asarray(data, dtype=complex)
        if enforce:
            data = 0.5 * (data + data.conj().T)
            data = data / np.trace(data).real
        rho = cls(space, data, diagnostics)
        rho.validate()
        return rho

    def validate(self) -> None:
        herm = float(np.abs(self.data - self.data.conj().T).max())
        if herm >= HERMITICITY_TOL:
            raise NonPhysicalStateError(
                f"density matrix is not Hermitian: max |rho - rho'| = {herm:.3e}"
            )
        tr = complex(np.trace(self.data))
        if abs(tr - 1.0) >= TRACE_TOL:
            raise NonPhysicalStateError(
                f"density matrix trace deviates from one by {abs(tr - 1.0):.3e}"
            )
        lo = float(np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T)).min())
        if lo <= POSITIVITY_FLOOR:
            raise NonPhysicalStateError(
                f"density matrix has eigenvalue {lo:.3e} below the positivity floor"
            )


@dataclass(frozen=True)
class Superoperator:
    """Sparse D^2 x D^2 generator acting on column-stacked density matrices.

    ``components`` optionally keeps the (H, collapse operators) the
    generator was assembled from; the steady-state solver uses them to
    build a no-jump preconditioner and never needs them for correctness.
    """

    space: CompositeSpace
    data: sp.csr_matrix = field(repr=False)
    components: tuple[Operator, tuple[Operator, ...]] | None = field(
        default=None, compare=False, repr=False
    )

    @property
    def dim(self) -> int:
        return self.space.dim ** 2

    def norm_fro(self) -> float:
        return float(np.sqrt((np.abs(self.data.data) ** 2).sum()))


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(vector).reshape((dim, dim), order="F")


def build_liouvillian(hamiltonian: Operator, c_ops: list[Operator]) -> Superoperator:
    """Assemble the sparse Lindblad generator from H and collapse operators."""
    space = hamiltonian.space
    for op in c_ops:
        if op.space != space:
            raise SpaceMismatchError(
                "collapse operator space does not match the Hamiltonian: "
                f"{op.space.mode_dims} vs {space.mode_dims}"
            )
    d = space.dim
    eye = sp.identity(d, format="csr", dtype=complex)
    h = sp.csr_matrix(hamiltonian.data)
    liouv = -1j * (sp.kron(eye, h, format="csr") - sp.kron(h.T, eye, format="csr"))
    for op in c_ops:
        c = sp.csr_matrix(op.data)
        cdc = (c.conj().T @ c).tocsr()
        liouv = liouv + sp.kron(c.conj(), c, format="csr")
        liouv = liouv - 0.5 * sp.kron(eye, cdc, format="csr")
        liouv = liouv - 0.5 * sp.kron(cdc.T, eye, format="csr")
    return Superoperator(space, liouv.tocsr(), (hamiltonian, tuple(c_ops)))


def _trace_vector(dim: int) -> np.ndarray:
    v = np.zeros(dim * dim, dtype=complex)
    v[np.arange(dim) * (dim + 1)] = 1.0
    return v


def trace_violation(liouv: Superoperator) -> float:
    """Norm of vec(I)' L relative to ||L||_F; zero for a trace-preserving L."""
    d = liouv.space.dim
    row = liouv.data.T @ _trace_vector(d).conj()
    return float(np.linalg.norm(row) / max(liouv.norm_fro(), 1e-300))


def _finalize(
    liouv: Superoperator,
    raw: np.ndarray,
    opts: SteadyStateOptions,
    method: str,
) -> DensityMatrix:
    d = liouv.space.dim
    rho = unvec(raw, d)
    herm_defect = float(np.abs(rho - rho.conj().T).max())
    if opts.hermitize:
        rho = 0.5 * (rho + rho.conj().T)
    tr = complex(np.trace(rho))
    trace_defect = abs(tr - 1.0)
    if abs(tr) < 1e-14:
        raise NoConvergenceError(
            "steady-state candidate has (near-)zero trace and cannot be normalized",
            residual=float("inf"),
        )
    rho = rho / tr.real if opts.hermitize else rho / tr
    x = vec(rho)
    residual = float(np.linalg.norm(liouv.data @ x))
    bound = opts.residual_tol * liouv.norm_fro() * float(np.linalg.norm(x))
    if not np.isfinite(residual) or residual > bound:
        raise NoConvergenceError(
            f"steady-state residual {residual:.3e} exceeds bound {bound:.3e}",
            residual=residual,
            bound=bound,
        )
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    diag = SolveDiagnostics(
        method=method,
        residual=residual,
        residual_bound=bound,
        hermiticity_defect=herm_defect,
        trace_defect=trace_defect,
        min_eigenvalue=min_eig,
    )
    return DensityMatrix.from_array(
        liouv.space, rho, enforce=False, diagnostics=diag
    )


def _constrained_system(liouv: Superoperator):
    """Trace-constrained linear system (A, b) with A nonsingular for a
    generator whose kernel is one-dimensional.

    Only rows at density-matrix diagonal positions carry the left-kernel
    dependency sum_i L[i*(d+1), :] = 0; replacing any other row leaves
    that dependency in place and the constrained system singular.  Among
    the eligible rows the one with the largest diagonal magnitude is
    swapped for the trace functional.
    """
    d = liouv.space.dim
    n = d * d
    matrix = liouv.data.tocsr()
    diag_positions = np.arange(d) * (d + 1)
    k = int(diag_positions[np.argmax(np.abs(matrix.diagonal()[diag_positions]))])
    trace_row = sp.csr_matrix(
        (np.ones(d, dtype=complex), (np.zeros(d, dtype=int), diag_positions)),
        shape=(1, n),
    )
    constrained = sp.vstack([matrix[:k], trace_row, matrix[k + 1 :]], format="csr")
    rhs = np.zeros(n, dtype=complex)
    rhs[k] = 1.0
    return constrained, rhs


def _no_jump_preconditioner(liouv: Superoperator):
    """Exact inverse of the no-jump generator as a LinearOperator.

    With H_eff = H - (i/2) sum_k C_k'C_k diagonalized as V diag(lam) V^-1,
    the no-jump part L0(rho) = -i (H_eff rho - rho H_eff') inverts in a few
    dense D x D products: rho = V [ (V^-1 B V^-dag) / (-i (lam_i -
    conj(lam_j))) ] V'.  Near-zero denominators (undamped pairs) are
    clamped, which only weakens the preconditioner, never the solution.
    Returns None when no usable decomposition exists.
    """
    if liouv.components is None:
        return None
    hamiltonian, c_ops = liouv.components
    d = liouv.space.dim
    heff = hamiltonian.data.astype(complex, copy=True)
    for op in c_ops:
        heff -= 0.5j * (op.data.conj().T @ op.data)
    try:
        lam, v = np.linalg.eig(heff)
        v_inv = np.linalg.inv(v)
    except np.linalg.LinAlgError:
        return None
    if np.linalg.cond(v) > 1e8:
        return None
    denom = -1j * (lam[:, None] - lam[None, :].conj())
    floor = 1e-6 * max(float(np.abs(denom).max()), 1.0)
    small = np.abs(denom) < floor
    if small.any():
        denom = np.where(small, floor, denom)
    v_dag = v.conj().T
    v_inv_dag = v_inv.conj().T

    def apply(y):
        b = y.reshape((d, d), order="F")
        x = v @ ((v_inv @ b @ v_inv_dag) / denom) @ v_dag
        return x.reshape(-1, order="F")

    n = d * d
    return spla.LinearOperator((n, n), matvec=apply, dtype=complex)


def _gmres(constrained, rhs, preconditioner, rtol):
    kwargs = dict(M=preconditioner, atol=0.0, restart=200, maxiter=5)
    try:
        return spla.gmres(constrained, rhs, rtol=rtol, **kwargs)
    except TypeError:  # scipy < 1.12 spells the relative tolerance 'tol'
        return spla.gmres(constrained, rhs, tol=rtol, **kwargs)


def _gmres_refined(constrained, rhs, preconditioner):
    """GMRES plus iterative refinement.

    Correlation tails (g3 at deep-blockade points) sit many orders below
    the leading density-matrix entries, so the solve is refined until the
    constrained residual is near machine precision, not just below the
    acceptance bound.
    """
    x, info = _gmres(constrained, rhs, preconditioner, rtol=1e-11)
    if info != 0 or not np.all(np.isfinite(x)):
        return x, info
    norm_rhs = float(np.linalg.norm(rhs))
    for _ in range(3):
        residual = rhs - constrained @ x
        if float(np.linalg.norm(residual)) <= 1e-14 * norm_rhs:
            break
        dx, info = _gmres(constrained, residual, preconditioner, rtol=1e-8)
        if info != 0 or not np.all(np.isfinite(dx)):
            break
        x = x + dx
    return x, 0 if np.all(np.isfinite(x)) else info


def _solve_trace_constrained(liouv: Superoperator, opts: SteadyStateOptions) -> DensityMatrix:
    constrained, rhs = _constrained_system(liouv)
    preconditioner = _no_jump_preconditioner(liouv)
    if preconditioner is not None:
        x, info = _gmres_refined(constrained, rhs, preconditioner)
        if info == 0 and np.all(np.isfinite(x)):
            try:
                return _finalize(
                    liouv, x, opts, SteadyStateMethod.TRACE_CONSTRAINED.value
                )
            except NoConvergenceError:
                pass  # retry below with the direct factorization
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            x = spla.spsolve(constrained.tocsc(), rhs)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise NoConvergenceError(
                "trace-constrained solve hit a singular factorization; the kernel "
                "may be degenerate (try the null-space method)",
                residual=float("inf"),
            ) from exc
    if not np.all(np.isfinite(x)):
        raise NoConvergenceError(
            "trace-constrained solve returned non-finite entries",
            residual=float("inf"),
        )
    return _finalize(liouv, x, opts, SteadyStateMethod.TRACE_CONSTRAINED.value)


def _solve_null_space(liouv: Superoperator, opts: SteadyStateOptions) -> DensityMatrix:
    n = liouv.dim
    scale = liouv.norm_fro()
    if n <= _DENSE_NULLSPACE_LIMIT:
        dense = liouv.data.toarray()
        _, sigma, vh = np.linalg.svd(dense)
        tol = max(1e-10 * sigma[0], 1e-300)
        kernel_dim = int(np.count_nonzero(sigma < tol))
        if kernel_dim > 1:
            raise NonUniqueSteadyStateError(
                f"Liouvillian kernel is {kernel_dim}-dimensional; "
                "the steady state is not unique"
            )
        x = vh[-1].conj()
    else:
        shift = 1e-10 * scale
        try:
            vals, vecs = spla.eigs(liouv.data.tocsc(), k=2, sigma=shift, which="LM")
        except Exception as exc:  # factorization or Arnoldi failure
            raise NoConvergenceError(
                f"null-space extraction failed: {exc}", residual=float("inf")
            ) from exc
        order = np.argsort(np.abs(vals))
        if abs(vals[order[1]]) < 1e-12 * scale:
            raise NonUniqueSteadyStateError(
                "two Liouvillian eigenvalues are numerically zero; "
                "the steady state is not unique"
            )
        x = vecs[:, order[0]]
    return _finalize(liouv, x, opts, SteadyStateMethod.NULL_SPACE.value)


def steady_state(
    liouv: Superoperator, opts: SteadyStateOptions | None = None
) -> DensityMatrix:
    """Solve L vec(rho) = 0 with tr(rho) = 1.

    The returned state is hermitized and trace-renormalized, carries
    :class:`SolveDiagnostics`, and satisfies the density-matrix invariants.
    Raises :class:`NoConvergenceError` if the final residual exceeds
    ``residual_tol * ||L||_F * ||vec(rho)||`` and
    :class:`NonUniqueSteadyStateError` when the null-space method detects a
    degenerate kernel.
    """
    opts = opts or SteadyStateOptions()
    if opts.method is SteadyStateMethod.TRACE_CONSTRAINED:
        return _solve_trace_constrained(liouv, opts)
    return _solve_null_space(liouv, opts)


def evolve(
    hamiltonian: Operator,
    c_ops: list[Operator],
    rho0: DensityMatrix,
    t_final: float,
    dt: float,
) -> DensityMatrix:
    """Fixed-step RK4 integration of the master equation in matrix form.

    Intentionally independent of :func:`build_liouvillian` so long-time
    integration can cross-check the direct steady-state solve.  The trace
    is renormalized whenever it drifts beyond 1e-12 in a step; a per-step
    drift above 1e-6 aborts with :class:`StepTooLargeError`.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_final < dt:
        raise ValueError(f"t_final must be >= dt, got {t_final} < {dt}")
    space = hamiltonian.space
    if rho0.space != space:
        raise SpaceMismatchError("initial state space does not match the Hamiltonian")
    h = hamiltonian.data
    cs = [op.data for op in c_ops]
    cdags = [c.conj().T for c in cs]
    cdcs = [cd @ c for c, cd in zip(cs, cdags)]

    def rhs(rho):
        out = -1j * (h @ rho - rho @ h)
        for c, cdag, cdc in zip(cs, cdags, cdcs):
            out += c @ rho @ cdag - 0.5 * (cdc @ rho + rho @ cdc)
        return out

    rho = rho0.data.copy()
    n_full = int(t_final / dt)
    remainder = t_final - n_full * dt
    steps = [dt] * n_full
    if remainder > 1e-12 * dt:
        steps.append(remainder)
    for h_step in steps:
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * h_step * k1)
        k3 = rhs(rho + 0.5 * h_step * k2)
        k4 = rhs(rho + h_step * k3)
        rho = rho + (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tr = np.trace(rho).real
        drift = abs(tr - 1.0)
        if drift > 1e-6:
            raise StepTooLargeError(
                f"trace drifted by {drift:.3e} in one step of size {h_step}; "
                "reduce dt"
            )
        if drift > 1e-12:
            rho = rho / tr
    return DensityMatrix.from_array(space, rho, enforce=True)
