"""Matrix realizations of the built-in groups, exponentials, and point sampling."""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass

import numpy as np

from .algebra import LieAlgebra
from .errors import StructureError

HOMOMORPHISM_TOL = 1e-10


def exp_matrix(x, t: float = 1.0) -> np.ndarray:
    """e^{tX}.

    Nilpotent matrices (a power is exactly zero) get the terminating power
    series, which is exact up to rounding.  Everything else goes through
    scaling-and-squaring with a degree-12 truncated series scaled so that
    ||tX|| / 2^k <= 0.5.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)) or not math.isfinite(t):
        raise ValueError("exp_matrix requires finite entries")
    n = x.shape[0]
    a = t * x
    powers = [np.eye(n)]
    p = np.eye(n)
    nilpotent = False
    for _ in range(n):
        p = p @ a
        if not p.any():
            nilpotent = True
            break
        powers.append(p)
    if nilpotent:
        out = np.zeros_like(a)
        fact = 1.0
        for m, pm in enumerate(powers):
            if m > 0:
                fact *= m
            out += pm / fact
        return out
    norm = float(np.linalg.norm(a, 2))
    k = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    b = a / (2.0 ** k)
    out = np.eye(n)
    term = np.eye(n)
    for m in range(1, 13):
        term = term @ b / m
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


@dataclass(frozen=True)
class MatrixRealization:
    """One ambient x ambient matrix per algebra basis vector."""

    algebra: LieAlgebra
    rep: tuple
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        mats = tuple(np.array(m, dtype=float) for m in self.rep)
        if len(mats) != self.algebra.dim:
            raise StructureError(f"need {self.algebra.dim} matrices, got {len(mats)}")
        n = mats[0].shape[0]
        for m in mats:
            if m.shape != (n, n):
                raise StructureError("realization matrices must share a square shape")
            m.flags.writeable = False
        object.__setattr__(self, "rep", mats)
        if validate:
            flat = np.stack([m.reshape(-1) for m in mats])
            scale = max(1.0, float(np.abs(flat).max()))
            if np.linalg.matrix_rank(flat, tol=1e-10 * scale) < len(mats):
                raise StructureError("realization matrices are linearly dependent")
            resid = self.homomorphism_residual()
            if resid > HOMOMORPHISM_TOL:
                raise StructureError(f"realization is not a homomorphism (residual {resid:.3e})")

    @property
    def ambient(self) -> int:
        return self.rep[0].shape[0]

    def matrix_of(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.algebra.dim,):
            raise ValueError(f"coordinate vector must have length {self.algebra.dim}")
        return np.einsum("i,ijk->jk", x, np.stack(self.rep))

    def homomorphism_residual(self) -> float:
        c = self.algebra.structure_constants
        worst = 0.0
        for i, mi in enumerate(self.rep):
            for j, mj in enumerate(self.rep):
                expected = sum(c[i, j, k] * mk for k, mk in enumerate(self.rep))
                worst = max(worst, float(np.abs(mi @ mj - mj @ mi - expected).max()))
        return worst


def sample_points(realization: MatrixRealization, count: int, seed: int,
                  scale: float = 1.0) -> list[np.ndarray]:
    """Deterministic group points exp(v_1 X_1) ... exp(v_d X_d), v_i ~ U[-scale, scale]."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        coeffs = rng.uniform(-scale, scale, realization.algebra.dim)
        p = np.eye(realization.ambient)
        for coeff, mat in zip(coeffs, realization.rep):
            p = p @ exp_matrix(mat, float(coeff))
        if not np.all(np.isfinite(p)):
            raise StructureError("sampled point has non-finite entries; reduce scale")
        points.append(p)
    return points


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _unit(n, i, j):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


def _algebra_from_matrices(mats, gram=None) -> tuple[LieAlgebra, MatrixRealization]:
    """Read structure constants off the matrices themselves.

    Every commutator must stay in the span of the basis; that closure is what
    makes the realization a homomorphism by construction.
    """
    mats = [np.asarray(m, dtype=float) for m in mats]
    d = len(mats)
    flat = np.stack([m.reshape(-1) for m in mats], axis=1)
    c = np.zeros((d, d, d))
    for i in range(d):
        for j in range(i + 1, d):
            comm = (mats[i] @ mats[j] - mats[j] @ mats[i]).reshape(-1)
            coeff, *_ = np.linalg.lstsq(flat, comm, rcond=None)
            resid = float(np.linalg.norm(flat @ coeff - comm))
            if resid > 1e-10 * max(1.0, float(np.linalg.norm(comm))):
                raise StructureError("basis is not closed under the commutator")
            coeff[np.abs(coeff) < 1e-13] = 0.0
            c[i, j] = coeff
            c[j, i] = -coeff
    if gram is None:
        gram = np.eye(d)
    algebra = LieAlgebra(c, gram)
    return algebra, MatrixRealization(algebra, tuple(mats))


def build_N(n: int) -> tuple[LieAlgebra, MatrixRealization]:
    """Strictly upper triangular n x n matrices; the group is unipotent."""
    if n < 2:
        raise ValueError("build_N requires n >= 2")
    mats = [_unit(n, r, s) for r in range(n) for s in range(r + 1, n)]
    return _algebra_from_matrices(mats)


def upper_entry_index(n: int, r: int, s: int) -> int:
    """Position of E_rs (r < s, zero-based) in the build_N / build_S off-diagonal order."""
    if not 0 <= r < s < n:
        raise ValueError("need 0 <= r < s < n")
    return sum(n - 1 - k for k in range(r)) + (s - r - 1)


def build_H(n: int) -> tuple[LieAlgebra, MatrixRealization]:
    """Heisenberg group of dimension 2n + 1, realized inside (n+2) x (n+2) matrices.

    Basis order: X_1..X_n, Y_1..Y_n, Z with [X_k, Y_k] = Z.
    """
    if n < 1:
        raise ValueError("build_H requires n >= 1")
    m = n + 2
    mats = [_unit(m, 0, 1 + k) for k in range(n)]
    mats += [_unit(m, 1 + k, n + 1) for k in range(n)]
    mats.append(_unit(m, 0, n + 1))
    return _algebra_from_matrices(mats)


def build_K(n: int) -> tuple[LieAlgebra, MatrixRealization]:
    """Filiform-type nilpotent group of dimension n + 1 inside (n+1) x (n+1) matrices.

    Basis order: Y_1..Y_n (last column), then X = (E_12 + ... + E_{n-1,n}) / sqrt(n-1).
    """
    if n < 2:
        raise ValueError("build_K requires n >= 2")
    m = n + 1
    mats = [_unit(m, k, n) for k in range(n)]
    x = sum(_unit(m, j, j + 1) for j in range(n - 1)) / math.sqrt(n - 1)
    mats.append(x)
    return _algebra_from_matrices(mats)


def build_S(n: int) -> tuple[LieAlgebra, MatrixRealization]:
    """All upper triangular n x n matrices (connected component: positive diagonal).

    Basis order: diagonal units D_1..D_n, then E_rs for r < s.
    """
    if n < 2:
        raise ValueError("build_S requires n >= 2")
    mats = [_unit(n, t, t) for t in range(n)]
    mats += [_unit(n, r, s) for r in range(n) for s in range(r + 1, n)]
    return _algebra_from_matrices(mats)


def build_G3(alpha: float, beta: float) -> tuple[LieAlgebra, MatrixRealization]:
    """Solvable 3-dimensional group where e_1 acts on the plane by alpha*I + beta*J.

    The declared basis e_1, e_2, e_3 is orthonormal (identity gram), which for
    alpha, beta != 0 differs from the trace inner product of the realization.
    """
    if alpha == 0.0 and beta == 0.0:
        raise ValueError("build_G3 requires (alpha, beta) != (0, 0)")
    e1 = np.array([[alpha, -beta, 0.0], [beta, alpha, 0.0], [0.0, 0.0, 0.0]])
    e2 = _unit(3, 0, 2)
    e3 = _unit(3, 1, 2)
    return _algebra_from_matrices([e1, e2, e3], gram=np.eye(3))


def build_Galpha(alpha: float) -> tuple[LieAlgebra, MatrixRealization]:
    """Solvable 3-dimensional group where e_1 acts on the plane with eigenvalues alpha, -1."""
    e1 = np.diag([alpha, -1.0, 0.0])
    e2 = _unit(3, 0, 2)
    e3 = -_unit(3, 1, 2)
    return _algebra_from_matrices([e1, e2, e3], gram=np.eye(3))


DEFAULT_J = (np.array([[0.0, -1.0], [1.0, 0.0]]),)


def build_damek_ricci(dim_v: int, dim_z: int, j_maps=None) -> tuple[LieAlgebra, None]:
    """Solvable algebra v + z + a with a two-step nilradical v + z of Heisenberg type.

    j_maps gives, per z-basis vector Z_m, the skew map J_m on v defining
    [X, Y] = sum_m <J_m X, Y> Z_m; the maps must satisfy the Clifford relations
    J_a J_b + J_b J_a = -2 delta_ab I.  The generator A of a acts by 1/2 on v
    and by 1 on z.  No matrix realization is produced; all checks are run at
    the algebra level.
    """
    if dim_v < 1 or dim_z < 1:
        raise ValueError("build_damek_ricci requires dim_v >= 1 and dim_z >= 1")
    if j_maps is None:
        if (dim_v, dim_z) != (2, 1):
            raise ValueError("explicit j_maps are required unless (dim_v, dim_z) == (2, 1)")
        j_maps = DEFAULT_J
    j_maps = [np.asarray(j, dtype=float) for j in j_maps]
    if len(j_maps) != dim_z:
        raise StructureError(f"need {dim_z} J maps, got {len(j_maps)}")
    for m, j in enumerate(j_maps):
        if j.shape != (dim_v, dim_v):
            raise StructureError(f"J_{m} must be {dim_v} x {dim_v}")
        if float(np.abs(j + j.T).max()) > 1e-12:
            raise StructureError(f"failed Clifford identity: J_{m} is not skew-symmetric")
    for a in range(dim_z):
        for b in range(a, dim_z):
            anti = j_maps[a] @ j_maps[b] + j_maps[b] @ j_maps[a]
            target = -2.0 * np.eye(dim_v) if a == b else np.zeros((dim_v, dim_v))
            if float(np.abs(anti - target).max()) > 1e-12:
                raise StructureError(
                    f"failed Clifford identity: J_{a} J_{b} + J_{b} J_{a} != "
                    + ("-2 I" if a == b else "0"))
    d = dim_v + dim_z + 1
    ia = d - 1
    c = np.zeros((d, d, d))
    for i in range(dim_v):
        for j in range(dim_v):
            for m in range(dim_z):
                c[i, j, dim_v + m] = j_maps[m][j, i]
    for i in range(dim_v):
        c[ia, i, i] = 0.5
        c[i, ia, i] = -0.5
    for m in range(dim_z):
        c[ia, dim_v + m, dim_v + m] = 1.0
        c[dim_v + m, ia, dim_v + m] = -1.0
    return LieAlgebra(c, np.eye(d)), None
