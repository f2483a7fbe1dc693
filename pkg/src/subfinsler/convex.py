"""Norms, kinetic energies, and their convex duals.

The kinetic energy of a norm ``N`` is ``E(v) = N(v)**2 / 2`` and its
convex conjugate is ``E*(eta) = N*(eta)**2 / 2``, where ``N*`` is the
dual norm.  A covector ``eta`` belongs to the subdifferential of ``E``
at ``u`` exactly when

    N*(eta) = N(u)   and   <eta, u> = N(u)**2,

and the symmetric pair of equalities characterizes membership of ``u``
in the subdifferential of ``E*`` at ``eta``.  Both sets, together with
tightness of the Fenchel-Young inequality, are equivalent; the three
tests are exposed side by side by :func:`check_duality_inversion`.

Subdifferentials are returned as :class:`ConvexSet` values: a single
point, a polytope listed by its vertices, or a support-oracle set (the
disk-shaped subdifferentials of the rotationally symmetric corner norm
are of the last kind).  Membership is always decided by the defining
equalities above, so the test is uniform across representations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .polyhedra import Polyhedron, l1_ball, linf_ball

# Semantic aliases: plain coordinate arrays, covectors act by the dot product.
Vector = np.ndarray
Covector = np.ndarray

# Default tolerance for the subdifferential membership equalities.
MEMBERSHIP_TOL = 1e-9


class NormError(ValueError):
    """Raised for invalid norm parameters or unsupported operations."""


# ---------------------------------------------------------------------------
# Convex sets


@dataclass
class ConvexSet:
    """A convex set in one of three representations.

    ``kind`` is ``"point"``, ``"polytope"`` (vertex list), or
    ``"support"`` (membership oracle plus boundary samples).  The
    ``contains`` test always goes through the attached oracle so that
    all three kinds answer membership the same way.
    """

    kind: str
    point: np.ndarray | None = None
    vertices: np.ndarray | None = None
    support_samples: np.ndarray | None = None
    membership: Callable[[np.ndarray, float], bool] | None = None
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if self.membership is not None:
            return bool(self.membership(x, tol))
        if self.kind == "point":
            return bool(np.max(np.abs(x - self.point)) <= tol)
        raise NormError("set carries no membership oracle")

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Random elements of the set; includes extreme points when known."""
        if self.kind == "point":
            return np.tile(self.point, (count, 1))
        if self.kind == "polytope":
            verts = self.vertices
            rows = [verts[i % len(verts)] for i in range(min(count, len(verts)))]
            while len(rows) < count:
                w = rng.dirichlet(np.ones(len(verts)))
                rows.append(w @ verts)
            return np.array(rows)
        if self.sampler is not None:
            return self.sampler(rng, count)
        raise NormError("set carries no sampler")

    def to_json_dict(self) -> dict:
        data: dict = {"kind": self.kind}
        if self.point is not None:
            data["point"] = [float(x) for x in self.point]
        if self.vertices is not None:
            data["vertices"] = [[float(x) for x in row] for row in self.vertices]
        if self.support_samples is not None:
            data["support_samples"] = [[float(x) for x in row]
                                       for row in self.support_samples]
        return data


def _point_set(p: np.ndarray, membership=None) -> ConvexSet:
    p = np.asarray(p, dtype=float)
    return ConvexSet(kind="point", point=p, membership=membership)


def _sign_completions(u: np.ndarray) -> np.ndarray:
    """All sign vectors matching sign(u) where u is nonzero; +-1 elsewhere."""
    u = np.asarray(u, dtype=float)
    free = np.nonzero(u == 0.0)[0]
    base = np.sign(u)
    if len(free) == 0:
        return base[None, :]
    combos = np.array(np.meshgrid(*([[-1.0, 1.0]] * len(free))))
    combos = combos.reshape(len(free), -1).T
    out = np.tile(base, (combos.shape[0], 1))
    out[:, free] = combos
    return out


# ---------------------------------------------------------------------------
# Norm families


class Norm:
    """Base class: a norm with exact dual norm and subdifferentials."""

    family: str = ""
    dim: int = 0

    # gauge ----------------------------------------------------------

    def value(self, v: Vector) -> float:
        raise NotImplementedError

    def dual_value(self, eta: Covector) -> float:
        raise NotImplementedError

    @property
    def convexity_class(self) -> str:
        """One of ``polyhedral``, ``smooth-strongly-convex``,
        ``strongly-convex`` (strictly convex but with corners), or
        ``unknown`` for oracle-backed norms."""
        raise NotImplementedError

    # faces of the unit sphere ----------------------------------------

    def unit_face(self, eta: Covector) -> Vector:
        """The unit vector maximizing a nonzero covector.

        Defined only when the maximizer is unique (strictly convex
        ball); polyhedral norms raise."""
        raise NormError(f"unit maximizer of {self.family} is set-valued")

    def grad_dual_energy(self, eta: Covector) -> Vector:
        """Gradient of ``E*`` at ``eta``: dual norm times unit maximizer."""
        eta = np.asarray(eta, dtype=float)
        nd = self.dual_value(eta)
        if nd == 0.0:
            return np.zeros(self.dim)
        return nd * self.unit_face(eta)

    def regime_id(self, eta: Covector) -> int:
        """Discrete label of the smooth piece of ``E*`` at ``eta``.

        Used by the integrators to locate kink crossings; norms whose
        dual energy is globally smooth return a constant."""
        return 0

    # subdifferentials -------------------------------------------------

    def subdiff_energy(self, u: Vector) -> ConvexSet:
        raise NotImplementedError

    def subdiff_dual_energy(self, eta: Covector) -> ConvexSet:
        """For strictly convex balls this is the singleton gradient."""
        eta = np.asarray(eta, dtype=float)
        if self.dual_value(eta) == 0.0:
            return _point_set(np.zeros(self.dim),
                              membership=self._dual_membership(eta))
        return _point_set(self.grad_dual_energy(eta),
                          membership=self._dual_membership(eta))

    def _membership(self, u: Vector):
        """Membership oracle for the subdifferential of ``E`` at ``u``."""
        nu = self.value(np.asarray(u, dtype=float))
        uu = np.asarray(u, dtype=float)

        def check(eta: np.ndarray, tol: float) -> bool:
            return (abs(self.dual_value(eta) - nu) <= tol
                    and abs(float(eta @ uu) - nu * nu) <= tol)

        return check

    def _dual_membership(self, eta: Covector):
        nd = self.dual_value(np.asarray(eta, dtype=float))
        ee = np.asarray(eta, dtype=float)

        def check(v: np.ndarray, tol: float) -> bool:
            return (abs(self.value(v) - nd) <= tol
                    and abs(float(ee @ v) - nd * nd) <= tol)

        return check

    # serialization ----------------------------------------------------

    def params_dict(self) -> dict:
        return {}

    def to_json_dict(self) -> dict:
        return {"family": self.family, "dim": int(self.dim),
                "params": self.params_dict()}


class EuclideanNorm(Norm):
    """The round norm; self-dual, globally smooth off the origin."""

    family = "euclidean"

    def __init__(self, dim: int):
        self.dim = int(dim)

    def value(self, v):
        return float(np.linalg.norm(np.asarray(v, dtype=float)))

    def dual_value(self, eta):
        return float(np.linalg.norm(np.asarray(eta, dtype=float)))

    @property
    def convexity_class(self):
        return "smooth-strongly-convex"

    def unit_face(self, eta):
        eta = np.asarray(eta, dtype=float)
        nd = np.linalg.norm(eta)
        if nd == 0.0:
            raise NormError("unit maximizer undefined at the zero covector")
        return eta / nd

    def subdiff_energy(self, u):
        u = np.asarray(u, dtype=float)
        return _point_set(u.copy(), membership=self._membership(u))


class SumNorm(Norm):
    """Sum of absolute coordinates; dual to the max norm."""

    family = "l1"

    def __init__(self, dim: int):
        self.dim = int(dim)

    def value(self, v):
        return float(np.sum(np.abs(np.asarray(v, dtype=float))))

    def dual_value(self, eta):
        return float(np.max(np.abs(np.asarray(eta, dtype=float))))

    @property
    def convexity_class(self):
        return "polyhedral"

    def subdiff_energy(self, u):
        u = np.asarray(u, dtype=float)
        n1 = self.value(u)
        member = self._membership(u)
        if n1 == 0.0:
            return _point_set(np.zeros(self.dim), membership=member)
        verts = n1 * _sign_completions(u)
        if verts.shape[0] == 1:
            return _point_set(verts[0], membership=member)
        return ConvexSet(kind="polytope", vertices=verts, membership=member)

    def subdiff_dual_energy(self, eta):
        eta = np.asarray(eta, dtype=float)
        nd = self.dual_value(eta)
        member = self._dual_membership(eta)
        if nd == 0.0:
            return _point_set(np.zeros(self.dim), membership=member)
        active = np.nonzero(np.abs(eta) >= nd * (1.0 - 1e-12))[0]
        verts = np.zeros((len(active), self.dim))
        for row, i in enumerate(active):
            verts[row, i] = nd * np.sign(eta[i])
        if verts.shape[0] == 1:
            return _point_set(verts[0], membership=member)
        return ConvexSet(kind="polytope", vertices=verts, membership=member)


class MaxNorm(Norm):
    """Largest absolute coordinate; dual to the sum norm."""

    family = "linf"

    def __init__(self, dim: int):
        self.dim = int(dim)

    def value(self, v):
        return float(np.max(np.abs(np.asarray(v, dtype=float))))

    def dual_value(self, eta):
        return float(np.sum(np.abs(np.asarray(eta, dtype=float))))

    @property
    def convexity_class(self):
        return "polyhedral"

    def subdiff_energy(self, u):
        u = np.asarray(u, dtype=float)
        n = self.value(u)
        member = self._membership(u)
        if n == 0.0:
            return _point_set(np.zeros(self.dim), membership=member)
        active = np.nonzero(np.abs(u) >= n * (1.0 - 1e-12))[0]
        verts = np.zeros((len(active), self.dim))
        for row, i in enumerate(active):
            verts[row, i] = n * np.sign(u[i])
        if verts.shape[0] == 1:
            return _point_set(verts[0], membership=member)
        return ConvexSet(kind="polytope", vertices=verts, membership=member)

    def subdiff_dual_energy(self, eta):
        eta = np.asarray(eta, dtype=float)
        nd = self.dual_value(eta)
        member = self._dual_membership(eta)
        if nd == 0.0:
            return _point_set(np.zeros(self.dim), membership=member)
        verts = nd * _sign_completions(eta)
        if verts.shape[0] == 1:
            return _point_set(verts[0], membership=member)
        return ConvexSet(kind="polytope", vertices=verts, membership=member)


class PolyhedralNorm(Norm):
    """Norm whose unit ball is an explicit symmetric polytope."""

    family = "polyhedral"

    def __init__(self, poly: Polyhedron):
        self.poly = poly
        self.dim = poly.dim

    def value(self, v):
        return self.poly.value(v)

    def dual_value(self, eta):
        return self.poly.dual_value(eta)

    @property
    def convexity_class(self):
        return "polyhedral"

    def subdiff_energy(self, u):
        u = np.asarray(u, dtype=float)
        n = self.value(u)
        member = self._membership(u)
        if n == 0.0:
            return _point_set(np.zeros(self.dim), membership=member)
        vals = self.poly.functionals @ u
        active = np.nonzero(vals >= n * (1.0 - 1e-12))[0]
        verts = n * self.poly.functionals[active]
        if verts.shape[0] == 1:
            return _point_set(verts[0], membership=member)
        return ConvexSet(kind="polytope", vertices=verts, membership=member)

    def subdiff_dual_energy(self, eta):
        eta = np.asarray(eta, dtype=float)
        nd = self.dual_value(eta)
        member = self._dual_membership(eta)
        if nd == 0.0:
            return _point_set(np.zeros(self.dim), membership=member)
        face = self.poly.face_of(eta)
        verts = nd * self.poly.vertices[list(face.vertex_ids)]
        if verts.shape[0] == 1:
            return _point_set(verts[0], membership=member)
        return ConvexSet(kind="polytope", vertices=verts, membership=member)

    def params_dict(self):
        return self.poly.to_json_dict()


class CornerNorm(Norm):
    """Planar norm ``|x| + sqrt(x**2 + y**2)``.

    Strictly convex, but the unit sphere has corners at (0, +-1), so the
    dual ball has two flat edges there: the subdifferential of the
    energy on the corner rays is a segment.

    Dual norm, with m = eta_y / eta_x where defined:

        N*(eta) = |eta_y|                          if |eta_y| >= |eta_x|,
        N*(eta) = (eta_x**2 + eta_y**2)/(2|eta_x|) otherwise,

    and on the second piece the unit maximizer is
    ``sign(eta_x) * ((1 - m**2)/2, m)``.
    """

    family = "corner"

    def __init__(self, dim: int = 2):
        if dim != 2:
            raise NormError("corner norm is two-dimensional")
        self.dim = 2

    def value(self, v):
        x, y = float(v[0]), float(v[1])
        return abs(x) + math.hypot(x, y)

    def dual_value(self, eta):
        a, b = float(eta[0]), float(eta[1])
        if abs(b) >= abs(a):
            return abs(b)
        return (a * a + b * b) / (2.0 * abs(a))

    @property
    def convexity_class(self):
        return "strongly-convex"

    def regime_id(self, eta):
        a, b = float(eta[0]), float(eta[1])
        if abs(b) >= abs(a):
            return 0 if b >= 0.0 else 1
        return 2 if a > 0.0 else 3

    def unit_face(self, eta):
        a, b = float(eta[0]), float(eta[1])
        if a == 0.0 and b == 0.0:
            raise NormError("unit maximizer undefined at the zero covector")
        if abs(b) >= abs(a):
            return np.array([0.0, math.copysign(1.0, b)])
        m = b / a
        sgn = math.copysign(1.0, a)
        return sgn * np.array([(1.0 - m * m) / 2.0, m])

    def subdiff_energy(self, u):
        x, y = float(u[0]), float(u[1])
        member = self._membership(u)
        if x == 0.0 and y == 0.0:
            return _point_set(np.zeros(2), membership=member)
        n = self.value(u)
        if x != 0.0:
            r = math.hypot(x, y)
            grad = np.array([math.copysign(1.0, x) + x / r, y / r])
            return _point_set(n * grad, membership=member)
        # Corner ray: all covectors (s, y) with |s| <= |y| support here.
        verts = np.array([[-abs(y), y], [abs(y), y]])
        return ConvexSet(kind="polytope", vertices=verts, membership=member)


class AxisCornerNorm(Norm):
    """Rotationally symmetric corner norm on 3-space.

    ``N(x) = sqrt(x2**2 + x3**2) + sqrt(x1**2 + x2**2 + x3**2)``: the
    restriction to any plane containing the first axis is the planar
    corner norm, and the corners sweep out the first axis.  With
    ``h = eta1`` and ``k = sqrt(eta2**2 + eta3**2)``:

        N*(eta) = |h|                 if |h| >= k,
        N*(eta) = (h**2 + k**2)/(2k)  otherwise.
    """

    family = "axis_corner"

    def __init__(self, dim: int = 3):
        if dim != 3:
            raise NormError("axis corner norm is three-dimensional")
        self.dim = 3

    def value(self, v):
        v = np.asarray(v, dtype=float)
        return math.hypot(v[1], v[2]) + float(np.linalg.norm(v))

    def dual_value(self, eta):
        eta = np.asarray(eta, dtype=float)
        h = float(eta[0])
        k = math.hypot(eta[1], eta[2])
        if abs(h) >= k:
            return abs(h)
        return (h * h + k * k) / (2.0 * k)

    @property
    def convexity_class(self):
        return "strongly-convex"

    def regime_id(self, eta):
        h = float(eta[0])
        k = math.hypot(float(eta[1]), float(eta[2]))
        if abs(h) >= k:
            return 0 if h >= 0.0 else 1
        return 2

    def unit_face(self, eta):
        eta = np.asarray(eta, dtype=float)
        h = float(eta[0])
        k = math.hypot(eta[1], eta[2])
        if h == 0.0 and k == 0.0:
            raise NormError("unit maximizer undefined at the zero covector")
        if abs(h) >= k:
            return np.array([math.copysign(1.0, h), 0.0, 0.0])
        a = h / k
        b = (1.0 - a * a) / 2.0
        return np.array([a, b * eta[1] / k, b * eta[2] / k])

    def subdiff_energy(self, u):
        u = np.asarray(u, dtype=float)
        member = self._membership(u)
        g = math.hypot(u[1], u[2])
        r = float(np.linalg.norm(u))
        if r == 0.0:
            return _point_set(np.zeros(3), membership=member)
        n = self.value(u)
        if g > 0.0:
            grad = np.array([u[0] / r,
                             u[1] * (1.0 / g + 1.0 / r),
                             u[2] * (1.0 / g + 1.0 / r)])
            return _point_set(n * grad, membership=member)
        # Corner axis: the subdifferential is a disk orthogonal to it.
        c = float(u[0])
        angles = np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False)
        boundary = np.column_stack([np.full(16, c),
                                    abs(c) * np.cos(angles),
                                    abs(c) * np.sin(angles)])

        def draw(rng: np.random.Generator, count: int) -> np.ndarray:
            rho = abs(c) * np.sqrt(rng.uniform(size=count))
            phi = rng.uniform(0.0, 2.0 * np.pi, size=count)
            return np.column_stack([np.full(count, c),
                                    rho * np.cos(phi), rho * np.sin(phi)])

        return ConvexSet(kind="support", support_samples=boundary,
                         membership=member, sampler=draw)


class RootSumNorm(Norm):
    """Square root of (sum norm squared plus euclidean norm squared).

    The energy splits as the sum of the two component energies, so the
    dual energy is an infimal convolution solved exactly by soft
    thresholding: with ``s*`` the unique root of
    ``s - sum_i max(|eta_i| - s, 0) = 0``,

        E*(eta) = s***2/2 + sum_i max(|eta_i| - s*, 0)**2 / 2,

    and the gradient of ``E*`` is the soft-thresholded covector.
    """

    family = "root_sum"

    def __init__(self, dim: int):
        self.dim = int(dim)

    def value(self, v):
        v = np.asarray(v, dtype=float)
        n1 = float(np.sum(np.abs(v)))
        n2sq = float(v @ v)
        return math.sqrt(n1 * n1 + n2sq)

    def _threshold(self, eta: np.ndarray) -> float:
        a = np.sort(np.abs(eta))[::-1]
        if a[0] == 0.0:
            return 0.0
        top = 0.0
        for j in range(1, len(a) + 1):
            top += a[j - 1]
            s = top / (1.0 + j)
            lo = a[j] if j < len(a) else 0.0
            if lo <= s <= a[j - 1]:
                return float(s)
        raise NormError("threshold scan failed")  # pragma: no cover

    def dual_value(self, eta):
        eta = np.asarray(eta, dtype=float)
        s = self._threshold(eta)
        tail = np.maximum(np.abs(eta) - s, 0.0)
        return math.sqrt(s * s + float(tail @ tail))

    @property
    def convexity_class(self):
        return "strongly-convex"

    def regime_id(self, eta):
        eta = np.asarray(eta, dtype=float)
        s = self._threshold(eta)
        code = 0
        for x in eta:
            trit = 1
            if x > s:
                trit = 2
            elif x < -s:
                trit = 0
            code = 3 * code + trit
        return code

    def grad_dual_energy(self, eta):
        eta = np.asarray(eta, dtype=float)
        s = self._threshold(eta)
        return np.sign(eta) * np.maximum(np.abs(eta) - s, 0.0)

    def unit_face(self, eta):
        zeta = self.grad_dual_energy(eta)
        n = self.value(zeta)
        if n == 0.0:
            raise NormError("unit maximizer undefined at the zero covector")
        return zeta / n

    def subdiff_energy(self, u):
        u = np.asarray(u, dtype=float)
        member = self._membership(u)
        n1 = float(np.sum(np.abs(u)))
        if n1 == 0.0 and float(u @ u) == 0.0:
            return _point_set(np.zeros(self.dim), membership=member)
        verts = u + n1 * _sign_completions(u)
        if verts.shape[0] == 1:
            return _point_set(verts[0], membership=member)
        return ConvexSet(kind="polytope", vertices=verts, membership=member)

    def subdiff_dual_energy(self, eta):
        eta = np.asarray(eta, dtype=float)
        return _point_set(self.grad_dual_energy(eta),
                          membership=self._dual_membership(eta))


class OracleNorm(Norm):
    """Norm given only by a value callable; duals fall back to search.

    Used for pushforward norms with no closed form.  The dual norm is a
    maximization over the unit sphere, solved by seeded random restarts
    plus a local polish, so values are deterministic but carry sampling
    error around 1e-10 only on well-conditioned problems.
    """

    family = "oracle"

    def __init__(self, dim: int, value_fn: Callable[[np.ndarray], float],
                 restarts: int = 64, seed: int = 0):
        self.dim = int(dim)
        self._value_fn = value_fn
        self._restarts = int(restarts)
        self._seed = int(seed)

    def value(self, v):
        return float(self._value_fn(np.asarray(v, dtype=float)))

    @property
    def convexity_class(self):
        return "unknown"

    def _best_direction(self, eta: np.ndarray) -> np.ndarray:
        rng = np.random.default_rng(self._seed)
        dirs = rng.standard_normal((self._restarts, self.dim))
        dirs = np.vstack([dirs, np.eye(self.dim), -np.eye(self.dim),
                          eta[None, :]])

        def neg_ratio(d: np.ndarray) -> float:
            n = self.value(d)
            if n <= 0.0:
                return 0.0
            return -float(eta @ d) / n

        best = min(dirs, key=neg_ratio)
        res = minimize(neg_ratio, best, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14,
                                "maxiter": 4000})
        cand = res.x if res.fun < neg_ratio(best) else best
        return np.asarray(cand, dtype=float) / self.value(cand)

    def dual_value(self, eta):
        eta = np.asarray(eta, dtype=float)
        if not np.any(eta):
            return 0.0
        return float(eta @ self._best_direction(eta))

    def unit_face(self, eta):
        eta = np.asarray(eta, dtype=float)
        if not np.any(eta):
            raise NormError("unit maximizer undefined at the zero covector")
        return self._best_direction(eta)

    def subdiff_energy(self, u):
        u = np.asarray(u, dtype=float)
        member = self._membership(u)
        if not np.any(u):
            return _point_set(np.zeros(self.dim), membership=member)
        return ConvexSet(kind="support", membership=member)

    def to_json_dict(self):
        raise NormError("oracle norms are not serializable")


# ---------------------------------------------------------------------------
# Module-level operations


_FAMILIES = {
    "euclidean": lambda dim, params: EuclideanNorm(dim),
    "l1": lambda dim, params: SumNorm(dim),
    "linf": lambda dim, params: MaxNorm(dim),
    "corner": lambda dim, params: CornerNorm(dim),
    "axis_corner": lambda dim, params: AxisCornerNorm(dim),
    "root_sum": lambda dim, params: RootSumNorm(dim),
    "polyhedral": lambda dim, params: PolyhedralNorm(
        Polyhedron.from_json_dict(params)),
}


def make_norm(family: str, dim: int, **params) -> Norm:
    """Instantiate a norm family by name."""
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise NormError(f"unknown norm family {family!r}") from None
    return builder(dim, params)


def norm_from_json(data: dict) -> Norm:
    return make_norm(data["family"], int(data["dim"]),
                     **data.get("params", {}))


def energy(norm: Norm, v: Vector) -> float:
    """Kinetic energy ``N(v)**2 / 2``."""
    n = norm.value(v)
    return 0.5 * n * n


def dual_energy(norm: Norm, eta: Covector) -> float:
    """Convex conjugate of the energy: ``N*(eta)**2 / 2``."""
    n = norm.dual_value(eta)
    return 0.5 * n * n


def dual_norm(norm: Norm, eta: Covector) -> float:
    return norm.dual_value(eta)


def subdiff_energy(norm: Norm, u: Vector) -> ConvexSet:
    return norm.subdiff_energy(u)


def subdiff_dual_energy(norm: Norm, eta: Covector) -> ConvexSet:
    return norm.subdiff_dual_energy(eta)


def convexity_class(norm: Norm) -> str:
    return norm.convexity_class


def check_duality_inversion(norm: Norm, u: Vector, eta: Covector,
                            tol: float = MEMBERSHIP_TOL
                            ) -> tuple[bool, bool, bool]:
    """Evaluate the three equivalent optimality tests for a pair (u, eta).

    Returns (eta in dE(u), Fenchel-Young tight, u in dE*(eta)); the three
    answers agree up to tolerance effects near set boundaries.
    """
    u = np.asarray(u, dtype=float)
    eta = np.asarray(eta, dtype=float)
    nu = norm.value(u)
    nd = norm.dual_value(eta)
    pairing = float(eta @ u)
    in_primal = abs(nd - nu) <= tol and abs(pairing - nu * nu) <= tol
    fenchel = abs(0.5 * nu * nu + 0.5 * nd * nd - pairing) <= tol
    in_dual = abs(nu - nd) <= tol and abs(pairing - nd * nd) <= tol
    return in_primal, fenchel, in_dual


def as_polyhedron(norm: Norm) -> Polyhedron:
    """Unit ball of a polyhedral norm as an explicit polytope."""
    if isinstance(norm, PolyhedralNorm):
        return norm.poly
    if isinstance(norm, SumNorm):
        return l1_ball(norm.dim)
    if isinstance(norm, MaxNorm):
        return linf_ball(norm.dim)
    raise NormError(f"{norm.family} norm has no polytope unit ball")
