"""Left-invariant Levi-Civita connection, curvature tensor, and sectional curvature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import LieAlgebra, orthonormal_basis
from .errors import StructureError
from .groups import MatrixRealization


@dataclass(frozen=True)
class ConnectionTable:
    """Connection coefficients over an orthonormal left-invariant frame.

    nabla_{X_a} X_b = sum_c gamma[a, b, c] X_c, where the frame vectors X_a are
    the rows of ``onb`` written in the algebra's declared basis.
    """

    algebra: LieAlgebra
    onb: np.ndarray
    gamma: np.ndarray
    frame_brackets: np.ndarray  # f[a, b, c] = <[X_a, X_b], X_c>

    def nabla(self, x, y) -> np.ndarray:
        """Covariant derivative in frame coordinates."""
        return np.einsum("a,b,abc->c", np.asarray(x, float), np.asarray(y, float), self.gamma)

    def to_algebra_coords(self, frame_vec) -> np.ndarray:
        return np.asarray(frame_vec, float) @ self.onb

    def to_frame_coords(self, algebra_vec) -> np.ndarray:
        return self.onb @ self.algebra.gram @ np.asarray(algebra_vec, float)

    def invariant_residuals(self) -> dict[str, float]:
        torsion = float(np.abs(self.gamma - self.gamma.transpose(1, 0, 2) - self.frame_brackets).max())
        compat = float(np.abs(self.gamma + self.gamma.transpose(0, 2, 1)).max())
        return {"torsion_free": torsion, "metric_compatible": compat}


def koszul(algebra: LieAlgebra, onb=None) -> ConnectionTable:
    """Connection table from the Koszul formula for left-invariant fields.

    2 <nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>.
    """
    if onb is None:
        onb = orthonormal_basis(algebra)
    onb = np.asarray(onb, dtype=float)
    g = algebra.gram
    gram_check = onb @ g @ onb.T
    if float(np.abs(gram_check - np.eye(onb.shape[0])).max()) > 1e-10:
        raise StructureError("koszul requires an orthonormal frame")
    c = algebra.structure_constants
    br = np.einsum("ai,bj,ijk->abk", onb, onb, c)
    f = np.einsum("abk,kl,cl->abc", br, g, onb)
    # transpose(2,0,1)[a,b,c] = f[b,c,a] and transpose(1,2,0)[a,b,c] = f[c,a,b]
    gamma = 0.5 * (f - f.transpose(2, 0, 1) + f.transpose(1, 2, 0))
    return ConnectionTable(algebra, onb, gamma, f)


def gl_connection_term(realization: MatrixRealization, x) -> np.ndarray:
    """nabla_X X for the metric induced by trace(A B^t): project [X, X^t] back.

    Only valid when the algebra's gram equals the trace inner product of the
    realization matrices; anything else raises.
    """
    mats = realization.rep
    gram_rep = np.array([[float(np.sum(a * b)) for b in mats] for a in mats])
    if float(np.abs(gram_rep - realization.algebra.gram).max()) > 1e-10:
        raise StructureError("algebra gram is not the trace inner product of the realization")
    m = realization.matrix_of(x)
    comm = m @ m.T - m.T @ m
    b = np.array([float(np.sum(comm * a)) for a in mats])
    return np.linalg.solve(gram_rep, b)


def curvature(table: ConnectionTable) -> np.ndarray:
    """R[a,b,c,d] = <R(X_a, X_b) X_c, X_d> with R(X,Y)Z = [nabla_X, nabla_Y]Z - nabla_{[X,Y]}Z."""
    gamma, f = table.gamma, table.frame_brackets
    term1 = np.einsum("bce,aed->abcd", gamma, gamma)
    term2 = np.einsum("ace,bed->abcd", gamma, gamma)
    term3 = np.einsum("abe,ecd->abcd", f, gamma)
    return term1 - term2 - term3


def curvature_symmetry_residuals(r: np.ndarray) -> dict[str, float]:
    return {
        "antisymmetry_first_pair": float(np.abs(r + r.transpose(1, 0, 2, 3)).max()),
        "antisymmetry_second_pair": float(np.abs(r + r.transpose(0, 1, 3, 2)).max()),
        "pair_symmetry": float(np.abs(r - r.transpose(2, 3, 0, 1)).max()),
        "first_bianchi": float(np.abs(r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)).max()),
    }


def sectional(r: np.ndarray, x, y) -> float:
    """Sectional curvature of the plane span{x, y}, frame coordinates."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    num = float(np.einsum("abcd,a,b,c,d->", r, x, y, y, x))
    den = float((x @ x) * (y @ y) - (x @ y) ** 2)
    scale = float((x @ x) * (y @ y))
    if den <= 1e-12 * max(scale, 1e-300):
        raise ValueError("sectional curvature needs linearly independent vectors")
    return num / den


def random_planes(dim: int, count: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Orthonormal 2-frames from Gaussian pairs, rejecting near-dependent draws."""
    rng = np.random.default_rng(seed)
    planes = []
    while len(planes) < count:
        x = rng.standard_normal(dim)
        y = rng.standard_normal(dim)
        nx = np.linalg.norm(x)
        if nx < 1e-6:
            continue
        x = x / nx
        y_perp = y - (x @ y) * x
        ny = np.linalg.norm(y_perp)
        if ny == 0.0 or np.linalg.norm(y) / ny > 1e6:
            continue
        planes.append((x, y_perp / ny))
    return planes


def sectional_profile(algebra: LieAlgebra, n_planes: int = 500, seed: int = 0,
                      table: ConnectionTable | None = None) -> tuple[float, float, float]:
    """(min, max, mean) of sectional curvature over random planes."""
    if table is None:
        table = koszul(algebra)
    r = curvature(table)
    values = [sectional(r, x, y) for x, y in random_planes(algebra.dim, n_planes, seed)]
    return float(np.min(values)), float(np.max(values)), float(np.mean(values))


def is_constant_curvature(algebra: LieAlgebra, n_planes: int = 500, seed: int = 0,
                          tol: float = 1e-7,
                          table: ConnectionTable | None = None) -> tuple[bool, float, float]:
    """(verdict, mean value, max-minus-min spread) over random planes."""
    lo, hi, mean = sectional_profile(algebra, n_planes, seed, table)
    spread = hi - lo
    return spread < tol, mean, spread
