"""Matrix Lie groups in explicit charts.

A :class:`GroupSpec` fixes a basis of the Lie algebra inside a matrix
space, the structure constants computed from matrix brackets, and a
polarization: the indices of the basis vectors spanning the subspace of
admissible velocities.  Group elements are plain chart matrices; the
exponential uses a closed form where one is registered and falls back
to the dense scaling-and-squaring exponential otherwise.

The adjoint action is conjugation in the chart, pulled back to algebra
coordinates; :func:`coadjoint_dual_point` composes a covector with it
and restricts to the polarization, which is the quantity transported
along normal curves.

:class:`SubmetryData` describes a surjective homomorphism onto a lower
dimensional group whose differential maps the velocity ball onto the
target ball; :func:`pushforward_norm` computes that image norm (exactly
for polytopes, by fiber minimization otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linprog, minimize_scalar

from . import convex
from .polyhedra import Polyhedron

# Brackets of basis elements must land in the basis span this tightly.
CLOSURE_TOL = 1e-9
JACOBI_TOL = 1e-12
# Chart matrices must sit on the group variety this tightly.
VARIETY_TOL = 1e-9

# A group element is just its chart matrix.
GroupElement = np.ndarray


class GroupChartError(RuntimeError):
    """A matrix failed to pull back consistently to the chart basis."""


@dataclass(frozen=True)
class GroupSpec:
    """A Lie group presented by a matrix chart.

    Attributes:
        name: Registry name.
        dim: Algebra dimension.
        basis: Array of shape (dim, N, N), the chart basis.
        structure: Constants c with [B_i, B_j] = sum_k c[i, j, k] B_k.
        polarization: Basis indices spanning the admissible velocities.
        exp_closed: Optional exact exponential, coords -> chart matrix.
        ad_pullback: Optional closed form for the adjoint matrix of a
            chart element (columns are images of the basis in coords).
        variety: Optional residual function; near zero on the group.
    """

    name: str
    dim: int
    basis: np.ndarray
    structure: np.ndarray
    polarization: tuple[int, ...]
    exp_closed: Callable[[np.ndarray], np.ndarray] | None = None
    ad_pullback: Callable[[np.ndarray], np.ndarray] | None = None
    variety: Callable[[np.ndarray], float] | None = None
    _flat_pinv: np.ndarray = field(repr=False, default=None)

    @property
    def matrix_size(self) -> int:
        return self.basis.shape[1]

    def identity(self) -> GroupElement:
        return np.eye(self.matrix_size)

    def to_json_dict(self) -> dict:
        triples = []
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    c = self.structure[i, j, k]
                    if c != 0.0:
                        triples.append([int(i), int(j), int(k), float(c)])
        return {
            "name": self.name,
            "dim": int(self.dim),
            "polarization": [int(i) for i in self.polarization],
            "basis": [[[float(x) for x in row] for row in mat]
                      for mat in self.basis],
            "structure_constants": triples,
        }


def to_matrix(spec: GroupSpec, coords: np.ndarray) -> np.ndarray:
    """Algebra coordinates to a matrix in the chart."""
    return np.einsum("i,iab->ab", np.asarray(coords, dtype=float), spec.basis)


def from_matrix(spec: GroupSpec, mat: np.ndarray) -> np.ndarray:
    """Matrix to algebra coordinates, with a span residual check."""
    mat = np.asarray(mat, dtype=float)
    coords = spec._flat_pinv @ mat.ravel()
    residual = np.linalg.norm(mat - to_matrix(spec, coords))
    if residual > CLOSURE_TOL * (1.0 + np.linalg.norm(mat)):
        raise GroupChartError(
            f"matrix lies {residual:.3e} outside the chart algebra span")
    return coords


def bracket(spec: GroupSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Lie bracket in coordinates via the structure constants."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.einsum("i,j,ijk->k", x, y, spec.structure)


def ad_matrix(spec: GroupSpec, x: np.ndarray) -> np.ndarray:
    """Matrix of ad_x = [x, .] acting on coordinates."""
    x = np.asarray(x, dtype=float)
    return np.einsum("i,ijk->kj", x, spec.structure)


def exp(spec: GroupSpec, coords: np.ndarray) -> GroupElement:
    """Group exponential of algebra coordinates."""
    coords = np.asarray(coords, dtype=float)
    if spec.exp_closed is not None:
        return spec.exp_closed(coords)
    return expm(to_matrix(spec, coords))


def adjoint_matrix(spec: GroupSpec, g: GroupElement) -> np.ndarray:
    """Coordinate matrix of Ad_g, i.e. conjugation by the chart element."""
    g = np.asarray(g, dtype=float)
    if spec.ad_pullback is not None:
        return spec.ad_pullback(g)
    ginv = np.linalg.inv(g)
    conj = np.einsum("ab,ibc,cd->iad", g, spec.basis, ginv)
    flat = conj.reshape(spec.dim, -1)
    coords = flat @ spec._flat_pinv.T
    recon = coords @ spec.basis.reshape(spec.dim, -1)
    residual = float(np.max(np.abs(recon - flat)))
    if residual > CLOSURE_TOL * (1.0 + float(np.max(np.abs(flat)))):
        raise GroupChartError(
            f"adjoint image lies {residual:.3e} outside the algebra span")
    return coords.T


def Ad(spec: GroupSpec, g: GroupElement, y: np.ndarray) -> np.ndarray:
    """Adjoint action of a group element on algebra coordinates."""
    return adjoint_matrix(spec, g) @ np.asarray(y, dtype=float)


def coadjoint_dual_point(spec: GroupSpec, lam: np.ndarray, g: GroupElement,
                         polarization: tuple[int, ...] | None = None
                         ) -> np.ndarray:
    """The covector lam composed with Ad_g, restricted to the polarization.

    This is the dual point carried by a normal curve through ``g``.
    """
    pol = spec.polarization if polarization is None else tuple(polarization)
    full = adjoint_matrix(spec, g).T @ np.asarray(lam, dtype=float)
    return full[list(pol)]


def variety_residual(spec: GroupSpec, g: GroupElement) -> float:
    """How far a chart matrix sits from the group variety."""
    if spec.variety is None:
        return 0.0
    return float(spec.variety(np.asarray(g, dtype=float)))


def check_element(spec: GroupSpec, g: GroupElement,
                  tol: float = VARIETY_TOL) -> None:
    res = variety_residual(spec, g)
    if res > tol:
        raise GroupChartError(
            f"matrix violates the {spec.name} variety by {res:.3e}")


def _jacobi_residual(structure: np.ndarray) -> float:
    # sum over cyclic permutations of [x,[y,z]] must vanish.
    comp = np.einsum("jkm,imn->ijkn", structure, structure)
    cyc = comp + np.einsum("ijkn->jkin", comp) + np.einsum("ijkn->kijn", comp)
    return float(np.max(np.abs(cyc)))


def matrix_group(name: str, basis: np.ndarray,
                 polarization: tuple[int, ...] | None = None,
                 exp_closed=None, ad_pullback=None, variety=None) -> GroupSpec:
    """Build a GroupSpec from a matrix basis.

    Structure constants are extracted from matrix brackets; the basis
    must close under brackets and satisfy the Jacobi identity.
    """
    basis = np.asarray(basis, dtype=float)
    dim = basis.shape[0]
    flat = basis.reshape(dim, -1)
    flat_pinv = np.linalg.pinv(flat.T)
    probe = GroupSpec(name=name, dim=dim, basis=basis,
                      structure=np.zeros((dim, dim, dim)),
                      polarization=tuple(range(dim)), _flat_pinv=flat_pinv)
    structure = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            br = basis[i] @ basis[j] - basis[j] @ basis[i]
            structure[i, j] = from_matrix(probe, br)
    jac = _jacobi_residual(structure)
    if jac > JACOBI_TOL:
        raise GroupChartError(f"Jacobi identity violated by {jac:.3e}")
    if polarization is None:
        polarization = tuple(range(dim))
    return GroupSpec(name=name, dim=dim, basis=basis, structure=structure,
                     polarization=tuple(int(i) for i in polarization),
                     exp_closed=exp_closed, ad_pullback=ad_pullback,
                     variety=variety, _flat_pinv=flat_pinv)


# ---------------------------------------------------------------------------
# Registry


def translation_group(dim: int) -> GroupSpec:
    """Abelian group of translations of dim-space, in an affine chart."""
    n = int(dim)
    basis = np.zeros((n, n + 1, n + 1))
    for i in range(n):
        basis[i, i, n] = 1.0

    def exp_closed(coords: np.ndarray) -> np.ndarray:
        g = np.eye(n + 1)
        g[:n, n] = coords
        return g

    def ad_pullback(g: np.ndarray) -> np.ndarray:
        return np.eye(n)

    def variety(g: np.ndarray) -> float:
        expected = np.eye(n + 1)
        expected[:n, n] = g[:n, n]
        return float(np.linalg.norm(g - expected))

    return matrix_group(f"translation{n}", basis, exp_closed=exp_closed,
                        ad_pullback=ad_pullback, variety=variety)


def heisenberg_group() -> GroupSpec:
    """3x3 unipotent upper triangular group.

    Coordinates (x1, x2, x3) sit in the chart
    [[1, x1, x3], [0, 1, x2], [0, 0, 1]]; the only nonzero bracket is
    [B1, B2] = B3, and B3 spans the center.
    """
    basis = np.zeros((3, 3, 3))
    basis[0, 0, 1] = 1.0
    basis[1, 1, 2] = 1.0
    basis[2, 0, 2] = 1.0

    def exp_closed(coords: np.ndarray) -> np.ndarray:
        m = np.zeros((3, 3))
        m[0, 1], m[1, 2], m[0, 2] = coords[0], coords[1], coords[2]
        return np.eye(3) + m + 0.5 * (m @ m)

    def ad_pullback(g: np.ndarray) -> np.ndarray:
        x1, x2 = g[0, 1], g[1, 2]
        return np.array([[1.0, 0.0, 0.0],
                         [0.0, 1.0, 0.0],
                         [-x2, x1, 1.0]])

    def variety(g: np.ndarray) -> float:
        expected = np.eye(3)
        expected[0, 1], expected[1, 2], expected[0, 2] = g[0, 1], g[1, 2], g[0, 2]
        return float(np.linalg.norm(g - expected))

    return matrix_group("heisenberg", basis, exp_closed=exp_closed,
                        ad_pullback=ad_pullback, variety=variety)


def affine_line_group() -> GroupSpec:
    """Orientation-preserving affine maps of the line.

    The map s -> t*s + x sits in the chart [[t, x], [0, 1]] with t > 0.
    Algebra coordinates (a, b) correspond to [[b, a], [0, 0]], so
    [B1, B2] = -B1 and Ad_{(x, t)}(a, b) = (t*a - x*b, b).
    """
    basis = np.zeros((2, 2, 2))
    basis[0, 0, 1] = 1.0
    basis[1, 0, 0] = 1.0

    def exp_closed(coords: np.ndarray) -> np.ndarray:
        a, b = float(coords[0]), float(coords[1])
        scale = math.expm1(b) / b if b != 0.0 else 1.0
        return np.array([[math.exp(b), a * scale], [0.0, 1.0]])

    def ad_pullback(g: np.ndarray) -> np.ndarray:
        t, x = g[0, 0], g[0, 1]
        return np.array([[t, -x], [0.0, 1.0]])

    def variety(g: np.ndarray) -> float:
        res = math.hypot(g[1, 0], g[1, 1] - 1.0)
        return res + max(0.0, -g[0, 0])

    return matrix_group("affine_line", basis, exp_closed=exp_closed,
                        ad_pullback=ad_pullback, variety=variety)


def rotation_group() -> GroupSpec:
    """Rotations of 3-space with a skew basis adapted to the first axis.

    Basis:
        B1 = [[0, 1, 0], [-1, 0, 0], [0, 0, 0]],
        B2 = [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
        B3 = [[0, 0, 0], [0, 0, 1], [0, -1, 0]],
    with brackets [B1, B2] = -B3, [B1, B3] = B2, [B2, B3] = -B1.
    """
    basis = np.zeros((3, 3, 3))
    basis[0, 0, 1], basis[0, 1, 0] = 1.0, -1.0
    basis[1, 0, 2], basis[1, 2, 0] = 1.0, -1.0
    basis[2, 1, 2], basis[2, 2, 1] = 1.0, -1.0

    def exp_closed(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        theta = float(np.linalg.norm(coords))
        m = np.einsum("i,iab->ab", coords, basis)
        if theta == 0.0:
            return np.eye(3)
        half = 0.5 * theta
        sinc = np.sinc(theta / np.pi)
        versine = 0.5 * np.sinc(half / np.pi) ** 2
        return np.eye(3) + sinc * m + versine * (m @ m)

    # Coordinates map to rotation axes through the involution T below
    # (B1, B2, B3 have axes -e3, e2, -e1), and conjugation acts on axes
    # by the matrix itself, so Ad_g = T g T.  The formula extends
    # smoothly off the orthogonal variety, which integrator stage
    # points need.
    axis_map = np.array([[0.0, 0.0, -1.0],
                         [0.0, 1.0, 0.0],
                         [-1.0, 0.0, 0.0]])

    def ad_pullback(g: np.ndarray) -> np.ndarray:
        return axis_map @ g @ axis_map

    def variety(g: np.ndarray) -> float:
        ortho = float(np.linalg.norm(g.T @ g - np.eye(3)))
        return ortho + abs(float(np.linalg.det(g)) - 1.0)

    return matrix_group("rotation", basis, exp_closed=exp_closed,
                        ad_pullback=ad_pullback, variety=variety)


_REGISTRY: dict[str, Callable[[], GroupSpec]] = {
    "heisenberg": heisenberg_group,
    "affine_line": affine_line_group,
    "rotation": rotation_group,
    "translation2": lambda: translation_group(2),
    "translation3": lambda: translation_group(3),
}


def group_by_name(name: str) -> GroupSpec:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise GroupChartError(f"unknown group {name!r}") from None


# ---------------------------------------------------------------------------
# Submetries


@dataclass(frozen=True)
class SubmetryData:
    """A surjective homomorphism pi whose differential maps the
    admissible ball of the source onto the unit ball of the target.

    Attributes:
        source, target: Group specs.
        dpi: Differential at the identity, target coords x source coords.
        group_map: Chart-level homomorphism, source matrix to target
            matrix; optional (only needed to project curves).
    """

    source: GroupSpec
    target: GroupSpec
    dpi: np.ndarray
    group_map: Callable[[np.ndarray], np.ndarray] | None = None

    def dpi_on_polarization(self, polarization: tuple[int, ...] | None = None
                            ) -> np.ndarray:
        pol = (self.source.polarization if polarization is None
               else tuple(polarization))
        return self.dpi[:, list(pol)]

    def lift_covector(self, lam_target: np.ndarray) -> np.ndarray:
        """Compose a target covector with dpi: the normal data of lifts."""
        return self.dpi.T @ np.asarray(lam_target, dtype=float)


def heisenberg_abelianization() -> SubmetryData:
    """Quotient of the Heisenberg group by its center, onto the plane."""
    source = heisenberg_group()
    target = translation_group(2)
    dpi = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

    def group_map(g: np.ndarray) -> np.ndarray:
        out = np.eye(3)
        out[0, 2], out[1, 2] = g[0, 1], g[1, 2]
        return out

    return SubmetryData(source=source, target=target, dpi=dpi,
                        group_map=group_map)


def min_norm_preimage(sub: SubmetryData, norm: convex.Norm, w: np.ndarray,
                      polarization: tuple[int, ...] | None = None
                      ) -> np.ndarray:
    """Least-norm admissible velocity mapping to ``w`` under dpi.

    Exact linear program for polyhedral norms; one-dimensional fibers
    are solved by bounded scalar minimization, and larger smooth fibers
    are not supported.
    """
    dpi_v = sub.dpi_on_polarization(polarization)
    w = np.asarray(w, dtype=float)
    dv = dpi_v.shape[1]
    if norm.convexity_class == "polyhedral":
        lams = convex.as_polyhedron(norm).functionals
        cost = np.zeros(dv + 1)
        cost[-1] = 1.0
        a_ub = np.hstack([lams, -np.ones((lams.shape[0], 1))])
        a_eq = np.hstack([dpi_v, np.zeros((dpi_v.shape[0], 1))])
        res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(lams.shape[0]),
                      A_eq=a_eq, b_eq=w,
                      bounds=[(None, None)] * (dv + 1), method="highs")
        if not res.success:
            raise GroupChartError(f"fiber LP failed: {res.message}")
        return res.x[:dv]
    particular, *_ = np.linalg.lstsq(dpi_v, w, rcond=None)
    _, sing, vt = np.linalg.svd(dpi_v)
    null = vt[np.sum(sing > 1e-12):].T
    if null.shape[1] == 0:
        return particular
    if null.shape[1] != 1:
        raise GroupChartError("only one-dimensional smooth fibers supported")
    direction = null[:, 0]
    span = 4.0 * (1.0 + norm.value(particular))
    res = minimize_scalar(lambda s: norm.value(particular + s * direction),
                          bounds=(-span, span), method="bounded",
                          options={"xatol": 1e-12})
    return particular + res.x * direction


def pushforward_norm(sub: SubmetryData, norm: convex.Norm,
                     polarization: tuple[int, ...] | None = None
                     ) -> convex.Norm:
    """Image of an admissible-velocity norm under dpi.

    The unit ball of the image norm is the dpi-image of the source
    ball: exact for polytopes, euclidean when dpi has orthonormal rows,
    and an oracle norm solving the fiber problem otherwise.
    """
    dpi_v = sub.dpi_on_polarization(polarization)
    if np.linalg.matrix_rank(dpi_v, tol=1e-12) < dpi_v.shape[0]:
        raise GroupChartError("differential does not cover the target")
    if norm.convexity_class == "polyhedral":
        ball = convex.as_polyhedron(norm)
        image = ball.vertices @ dpi_v.T
        return convex.PolyhedralNorm(Polyhedron.from_vertices(image))
    if (norm.family == "euclidean"
            and np.allclose(dpi_v @ dpi_v.T, np.eye(dpi_v.shape[0]),
                            atol=1e-12)):
        return convex.EuclideanNorm(dpi_v.shape[0])
    return convex.OracleNorm(
        dpi_v.shape[0],
        lambda w: norm.value(min_norm_preimage(sub, norm, w, polarization)))
