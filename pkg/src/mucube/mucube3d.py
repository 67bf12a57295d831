"""The triply periodic half-translation surface in R^3: faces, symmetries, flow.

Coordinate conventions used throughout the package:

* Face centers, cone points and edge midpoints have half-integer coordinates,
  so we store points *doubled* (``center2x``) to keep everything integral.
* A face is a closed unit square parallel to a coordinate plane.  Its normal
  axis is 0, 1 or 2 (x, y, z); the doubled center has an odd coordinate along
  the axis and even coordinates elsewhere.
* The surface is the set of points whose three coordinate-plane shadows all
  lie in the closed checkerboard

      C = closure{ (u, v) : floor(u - 1/2), floor(v - 1/2) of opposite parity }.

  ``face_patch_in_surface`` tests a candidate square directly against this
  definition by point sampling; ``is_face`` is the derived integer predicate.
  The two are checked against each other on a window in the test suite.
* A direction is a primitive integer pair (p, q) read in the chart of a face:
  the corresponding "slope" is q/p.  Directions are traced with exact integer
  arithmetic; no floating point enters any decision.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .exact import SqrtLength

AXES = (0, 1, 2)
# The two in-plane axes of a face with the given normal axis.
IN_PLANE = ((1, 2), (0, 2), (0, 1))

IntTriple = tuple[int, int, int]


class ConePointStart(ValueError):
    """Raised when a trace is started on a cone point or an edge."""


class InternalGeometryError(RuntimeError):
    """A structural invariant of the 3D model failed; indicates a bug."""


# ---------------------------------------------------------------------------
# The point-set definition and the face predicate
# ---------------------------------------------------------------------------

def _tiles(u: Fraction) -> list[int]:
    """Integers a with a + 1/2 <= u <= a + 3/2 (one or two of them)."""
    lo = u - Fraction(3, 2)
    hi = u - Fraction(1, 2)
    first = lo.numerator // lo.denominator  # floor
    if first < lo:
        first += 1
    out = []
    a = first
    while a <= hi:
        out.append(a)
        a += 1
    return out


def in_checkerboard(u: Fraction, v: Fraction) -> bool:
    """Membership in the *closed* checkerboard C (tile corners at Z+1/2)."""
    for a in _tiles(Fraction(u)):
        for b in _tiles(Fraction(v)):
            if (a + b) % 2:
                return True
    return False


def point_in_surface(p: Sequence[Fraction]) -> bool:
    x, y, z = (Fraction(c) for c in p)
    return in_checkerboard(x, y) and in_checkerboard(x, z) and in_checkerboard(y, z)


@dataclass(frozen=True, order=True)
class Face:
    """A unit square of the surface: doubled center plus normal axis."""

    center2x: IntTriple
    axis: int

    @property
    def center(self) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(Fraction(c, 2) for c in self.center2x)  # type: ignore[return-value]

    def in_plane_axes(self) -> tuple[int, int]:
        return IN_PLANE[self.axis]


def is_face(center2x: Sequence[int], axis: int) -> bool:
    """Derived predicate: does the candidate square belong to the surface?

    Characterization (validated against ``face_patch_in_surface``): the axis
    coordinate is a half-integer and the two in-plane center coordinates are
    integers of opposite parity.
    """
    c = tuple(center2x)
    if c[axis] % 2 == 0:
        return False
    i, j = IN_PLANE[axis]
    if c[i] % 2 or c[j] % 2:
        return False
    return (c[i] // 2 + c[j] // 2) % 2 != 0


def face_patch_in_surface(center2x: Sequence[int], axis: int, grid: int = 5) -> bool:
    """Point-sampling oracle: test a grid of interior points of the candidate
    square directly against the three checkerboard shadow conditions."""
    c = [Fraction(v, 2) for v in center2x]
    i, j = IN_PLANE[axis]
    for a in range(grid):
        for b in range(grid):
            p = list(c)
            p[i] = c[i] + Fraction(2 * a - (grid - 1), 2 * grid + 2)
            p[j] = c[j] + Fraction(2 * b - (grid - 1), 2 * grid + 2)
            if not point_in_surface(p):
                return False
    return True


def faces_in_box(lo: Sequence[int], hi: Sequence[int]) -> frozenset[Face]:
    """All faces whose center lies in the half-open box [lo, hi).

    Box corners are integers.  Any 2x2x2 box contains exactly 12 faces.
    """
    lo = tuple(lo)
    hi = tuple(hi)
    if any(l >= h for l, h in zip(lo, hi)):
        return frozenset()
    out = []
    for axis in AXES:
        i, j = IN_PLANE[axis]
        ax_vals = [v for v in range(2 * lo[axis], 2 * hi[axis]) if v % 2]
        i_vals = [2 * v for v in range(lo[i], hi[i])]
        j_vals = [2 * v for v in range(lo[j], hi[j])]
        for av in ax_vals:
            for iv in i_vals:
                for jv in j_vals:
                    c = [0, 0, 0]
                    c[axis], c[i], c[j] = av, iv, jv
                    if is_face(c, axis):
                        out.append(Face(tuple(c), axis))
    return frozenset(out)


def incident_faces(corner2x: Sequence[int]) -> frozenset[Face]:
    """Faces having the given doubled point (all coordinates odd) as a corner."""
    c = tuple(corner2x)
    if any(v % 2 == 0 for v in c):
        return frozenset()
    out = []
    for axis in AXES:
        i, j = IN_PLANE[axis]
        for di in (-1, 1):
            for dj in (-1, 1):
                cand = [0, 0, 0]
                cand[axis] = c[axis]
                cand[i] = c[i] + di
                cand[j] = c[j] + dj
                if is_face(cand, axis):
                    out.append(Face(tuple(cand), axis))
    return frozenset(out)


def cone_points_in_box(lo: Sequence[int], hi: Sequence[int]) -> frozenset[IntTriple]:
    """Doubled coordinates of the cone points in the half-open box [lo, hi).

    Every corner of the tiling is a cone point where six faces meet; the
    six-face incidence is re-verified here rather than assumed.
    """
    lo = tuple(lo)
    hi = tuple(hi)
    pts = []
    ranges = [[v for v in range(2 * lo[k], 2 * hi[k]) if v % 2] for k in AXES]
    for c in itertools.product(*ranges):
        n = len(incident_faces(c))
        if n == 6:
            pts.append(c)
        elif n > 0:
            raise InternalGeometryError(f"corner {c} has {n} incident faces")
    return frozenset(pts)


# ---------------------------------------------------------------------------
# Rigid motions: the semidirect product of Z^3 with the octahedral group
# ---------------------------------------------------------------------------

Mat3 = tuple[IntTriple, IntTriple, IntTriple]

IDENTITY_ROT: Mat3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
# Quarter turns about the coordinate axes and the coordinate 3-cycle.
QUARTER_X: Mat3 = ((1, 0, 0), (0, 0, -1), (0, 1, 0))
QUARTER_Y: Mat3 = ((0, 0, -1), (0, 1, 0), (1, 0, 0))
QUARTER_Z: Mat3 = ((0, -1, 0), (1, 0, 0), (0, 0, 1))
ROT3_XYZ: Mat3 = ((0, 0, 1), (1, 0, 0), (0, 1, 0))  # (x,y,z) -> (z,x,y)


def mat_mul(a: Mat3, b: Mat3) -> Mat3:
    return tuple(
        tuple(sum(a[r][k] * b[k][c] for k in AXES) for c in AXES) for r in AXES
    )  # type: ignore[return-value]


def mat_vec(a: Mat3, v: Sequence) -> tuple:
    return tuple(sum(a[r][k] * v[k] for k in AXES) for r in AXES)


def mat_transpose(a: Mat3) -> Mat3:
    return tuple(tuple(a[c][r] for c in AXES) for r in AXES)  # type: ignore[return-value]


def _det3(a: Mat3) -> int:
    return (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )


def is_signed_permutation(a: Mat3) -> bool:
    for row in a:
        if sorted(abs(v) for v in row) != [0, 0, 1]:
            return False
    for c in AXES:
        if sorted(abs(a[r][c]) for r in AXES) != [0, 0, 1]:
            return False
    return True


def rotation_group() -> list[Mat3]:
    """The 24 orientation-preserving symmetries of the cube."""
    gens = [QUARTER_X, QUARTER_Y, QUARTER_Z]
    seen = {IDENTITY_ROT}
    frontier = [IDENTITY_ROT]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = mat_mul(g, m)
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    assert len(seen) == 24
    return sorted(seen)


QUARTER_TURNS: tuple[Mat3, ...] = tuple(
    m for m in rotation_group()
    if mat_mul(m, m) != IDENTITY_ROT and mat_mul(mat_mul(m, m), mat_mul(m, m)) == IDENTITY_ROT
)  # the six order-4 rotations


@dataclass(frozen=True)
class RigidMotion:
    """x -> rotation . x + 2 * translation  (an element of Z^3 x| O)."""

    rotation: Mat3
    translation: IntTriple = (0, 0, 0)

    def __post_init__(self):
        if not is_signed_permutation(self.rotation) or _det3(self.rotation) != 1:
            raise ValueError("rotation must be a signed permutation matrix of det +1")

    def compose(self, other: "RigidMotion") -> "RigidMotion":
        # (t1, r1) . (t2, r2) = (t1 + r1 t2, r1 r2)
        t = tuple(
            self.translation[k] + mat_vec(self.rotation, other.translation)[k]
            for k in AXES
        )
        return RigidMotion(mat_mul(self.rotation, other.rotation), t)  # type: ignore[arg-type]

    def inverse(self) -> "RigidMotion":
        rinv = mat_transpose(self.rotation)
        t = mat_vec(rinv, [-v for v in self.translation])
        return RigidMotion(rinv, tuple(t))  # type: ignore[arg-type]

    def apply_point(self, p: Sequence) -> tuple:
        img = mat_vec(self.rotation, p)
        return tuple(img[k] + 2 * self.translation[k] for k in AXES)

    def apply_doubled(self, p2x: Sequence[int]) -> IntTriple:
        img = mat_vec(self.rotation, p2x)
        return tuple(img[k] + 4 * self.translation[k] for k in AXES)  # type: ignore[return-value]

    def apply_face(self, f: Face) -> Face:
        c = self.apply_doubled(f.center2x)
        axis_img = mat_vec(self.rotation, _axis_vec(f.axis))
        new_axis = next(k for k in AXES if axis_img[k] != 0)
        out = Face(c, new_axis)
        if not is_face(out.center2x, out.axis):
            raise InternalGeometryError(f"motion maps face {f} off the surface")
        return out

    def order(self, cap: int = 48) -> Optional[int]:
        acc = self
        ident = RigidMotion(IDENTITY_ROT)
        for n in range(1, cap + 1):
            if acc == ident:
                return n
            acc = acc.compose(self)
        return None


def _axis_vec(axis: int) -> IntTriple:
    v = [0, 0, 0]
    v[axis] = 1
    return tuple(v)  # type: ignore[return-value]


def apply_motion(g: RigidMotion, obj):
    """Apply a rigid motion to a Face or a Point3."""
    if isinstance(obj, Face):
        return g.apply_face(obj)
    if isinstance(obj, Point3):
        amb = g.apply_point(obj.ambient())
        u_img = mat_vec(g.rotation, obj.chart[0])
        v_img = mat_vec(g.rotation, obj.chart[1])
        face = g.apply_face(obj.face)
        return Point3.from_ambient(face, (tuple(u_img), tuple(v_img)), amb)
    raise TypeError(f"cannot apply motion to {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Charts and points on faces
# ---------------------------------------------------------------------------

def outward_sign(face: Face) -> int:
    """Sign of the outward normal along the face axis.

    The complement of the surface has two congruent labyrinth components;
    cells (unit cubes of the half-integer grid, centered at integer points)
    with at most one odd center coordinate form the component of the origin,
    which is taken to be the outside.  This fixes the orientation of every
    chart and hence all intersection signs.
    """
    for s in (1, -1):
        cell = list(face.center2x)
        cell[face.axis] += s
        odd = sum(1 for k in AXES if (cell[k] // 2) % 2)
        if odd <= 1:
            return s
    raise InternalGeometryError(f"no outward side at {face}")


def _cross(u: Sequence[int], v: Sequence[int]) -> IntTriple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


Chart = tuple[IntTriple, IntTriple]  # (u, v): ambient unit vectors


def default_chart(face: Face) -> Chart:
    """Right-handed chart with u along the smaller in-plane axis."""
    i, j = face.in_plane_axes()
    u = _axis_vec(i)
    v = _axis_vec(j)
    normal = tuple(outward_sign(face) * c for c in _axis_vec(face.axis))
    if _cross(u, v) != normal:
        v = tuple(-c for c in v)  # type: ignore[assignment]
    return (u, v)


def chart_is_valid(face: Face, chart: Chart) -> bool:
    u, v = chart
    i, j = face.in_plane_axes()
    if sorted((max(range(3), key=lambda k: abs(u[k])), max(range(3), key=lambda k: abs(v[k])))) != sorted((i, j)):
        return False
    normal = tuple(outward_sign(face) * c for c in _axis_vec(face.axis))
    return _cross(u, v) == normal


@dataclass(frozen=True)
class Point3:
    """A point on a face, in one of its four right-handed charts."""

    face: Face
    chart: Chart
    u: Fraction
    v: Fraction

    def __post_init__(self):
        if not chart_is_valid(self.face, self.chart):
            raise ValueError("chart is not a right-handed chart of this face")
        if not (0 <= self.u <= 1 and 0 <= self.v <= 1):
            raise ValueError("chart coordinates must lie in [0, 1]")

    def corner(self) -> tuple[Fraction, Fraction, Fraction]:
        cu, cv = self.chart
        return tuple(
            Fraction(self.face.center2x[k], 2) - Fraction(cu[k], 2) - Fraction(cv[k], 2)
            for k in AXES
        )  # type: ignore[return-value]

    def ambient(self) -> tuple[Fraction, Fraction, Fraction]:
        c = self.corner()
        cu, cv = self.chart
        return tuple(c[k] + self.u * cu[k] + self.v * cv[k] for k in AXES)  # type: ignore[return-value]

    @classmethod
    def from_ambient(cls, face: Face, chart: Chart, p: Sequence[Fraction]) -> "Point3":
        cu, cv = chart
        corner = tuple(
            Fraction(face.center2x[k], 2) - Fraction(cu[k], 2) - Fraction(cv[k], 2)
            for k in AXES
        )
        d = [Fraction(p[k]) - corner[k] for k in AXES]
        u = sum(d[k] * cu[k] for k in AXES)
        v = sum(d[k] * cv[k] for k in AXES)
        pt = cls(face, chart, u, v)
        if pt.ambient() != tuple(Fraction(c) for c in p):
            raise ValueError("point does not lie on the face")
        return pt

    @classmethod
    def face_center(cls, face: Face, chart: Optional[Chart] = None) -> "Point3":
        return cls(face, chart or default_chart(face), Fraction(1, 2), Fraction(1, 2))


# The seed face and chart shared by the tracer and the quotient surfaces.
SEED_FACE = Face((0, 2, 1), 2)
SEED_CHART: Chart = default_chart(SEED_FACE)  # u = +x, v = +y


# ---------------------------------------------------------------------------
# Exact tracing
# ---------------------------------------------------------------------------

@dataclass
class Trajectory3D:
    """Polygonal trajectory of the straight-line flow, embedded in R^3."""

    direction: tuple[int, int]
    vertices: list[tuple[Fraction, Fraction, Fraction]]
    closed: bool
    drift_vector: Optional[IntTriple]
    s_total: Fraction  # arc length is s_total * sqrt(p^2 + q^2)
    stop_reason: str  # closed | drift | cone_point | arc_bound | crossing_budget
    cone_point: Optional[tuple[Fraction, Fraction, Fraction]] = None
    face_path: list[Face] = field(default_factory=list)
    center_visits: list[tuple[tuple[Fraction, Fraction, Fraction], IntTriple]] = field(default_factory=list)
    crossings: int = 0

    @property
    def arc_length(self) -> SqrtLength:
        p, q = self.direction
        return SqrtLength.of(self.s_total, p * p + q * q)

    @property
    def norm_sq(self) -> int:
        p, q = self.direction
        return p * p + q * q


def _next_face(face_c2x: IntTriple, axis: int, wall_axis: int, wall2x: int) -> tuple[IntTriple, int]:
    """The face on the other side of an edge, in raw tuple form."""
    for da in (1, -1):
        cand = list(face_c2x)
        cand[wall_axis] = wall2x
        cand[axis] = face_c2x[axis] + da
        if is_face(cand, wall_axis):
            return tuple(cand), wall_axis  # type: ignore[return-value]
    raise InternalGeometryError(
        f"no face across edge of {face_c2x}/{axis} at axis {wall_axis}={wall2x}"
    )


def trace3d(
    start: Point3,
    direction: tuple[int, int],
    max_arc_s: Optional[Fraction] = None,
    *,
    margin_crossings: int = 0,
    max_crossings: int = 1_000_000,
    record_vertices: bool = True,
) -> Trajectory3D:
    """Trace the straight-line flow from ``start`` in chart direction (p, q).

    ``max_arc_s`` bounds the *unfolded parameter* s (arc length divided by
    sqrt(p^2+q^2)); ``margin_crossings`` extra crossings are allowed past the
    bound so that closure occurring exactly at the bound is never missed.
    Stops at closure (same point, same direction), at a drift revisit (same
    point up to a translation in (2Z)^3, same direction), at a cone point, or
    when a budget runs out.
    """
    p, q = direction
    if gcd(abs(p), abs(q)) != 1:
        raise ValueError("direction must be primitive")
    if not (0 < start.u < 1 and 0 < start.v < 1):
        raise ConePointStart("start must lie in the open face (edges are rejected)")

    den = (start.u.denominator * start.v.denominator) // gcd(
        start.u.denominator, start.v.denominator
    )
    sc = 2 * den * max(abs(p), 1) * max(abs(q), 1)
    two_sc = 2 * sc

    cu, cv = start.chart
    d_amb = tuple(p * cu[k] + q * cv[k] for k in AXES)
    amb0 = start.ambient()
    pos = [int(c * sc) for c in amb0]
    assert all(Fraction(pos[k], sc) == amb0[k] for k in AXES)

    face_c2x, axis = start.face.center2x, start.face.axis
    d = list(d_amb)
    s_scaled = 0
    bound_scaled = None if max_arc_s is None else Fraction(max_arc_s) * sc
    margin_left = margin_crossings

    start_pos = tuple(pos)
    anchor = None
    anchor_s = 0
    n_crossings = 0

    vertices: list[tuple[int, ...]] = [start_pos]
    face_path = [Face(face_c2x, axis)]
    center_visits: list[tuple[tuple[int, ...], IntTriple]] = []

    def record_centers(seg_start, dvec, delta):
        # Register exact passes through the face center of the current face.
        ci = [face_c2x[k] * (sc // 2) for k in AXES]
        t_hit = None
        for k in AXES:
            if dvec[k] == 0:
                if seg_start[k] != ci[k]:
                    return
            else:
                num = ci[k] - seg_start[k]
                if num % dvec[k]:
                    return
                t = num // dvec[k]
                if t_hit is None:
                    t_hit = t
                elif t != t_hit:
                    return
        if t_hit is None or not (0 <= t_hit < delta):
            return
        center_visits.append((tuple(ci), tuple(dvec)))

    while True:
        i, j = IN_PLANE[axis]
        best_axis = None
        best_delta = None
        tie = False
        for w in (i, j):
            dw = d[w]
            if dw == 0:
                continue
            half = sc // 2
            wall = (face_c2x[w] + (1 if dw > 0 else -1)) * half
            dist = (wall - pos[w]) if dw > 0 else (pos[w] - wall)
            delta, rem = divmod(dist, abs(dw))
            if rem:
                raise InternalGeometryError("non-integral step; scaling invariant broken")
            if best_delta is None or delta < best_delta:
                best_axis, best_delta, tie = w, delta, False
            elif delta == best_delta:
                tie = True
        if best_delta is None:
            raise InternalGeometryError("direction is normal to the face")

        record_centers(pos, d, best_delta)

        new_pos = [pos[k] + d[k] * best_delta for k in AXES]
        s_scaled += best_delta

        # A corner is reached when both in-plane coordinates sit on walls.
        at_wall = [
            new_pos[w] % sc == sc // 2 and abs(new_pos[w] - face_c2x[w] * (sc // 2)) == sc // 2
            for w in (i, j)
        ]
        if tie or all(at_wall):
            vertices.append(tuple(new_pos))
            return _finish(
                "cone_point", direction, vertices, sc, s_scaled, face_path,
                center_visits, n_crossings, cone=tuple(new_pos),
                record_vertices=record_vertices,
            )

        w = best_axis
        wall2x = (2 * new_pos[w]) // sc
        new_face, new_axis = _next_face(face_c2x, axis, w, wall2x)
        sign_a = new_face[axis] - face_c2x[axis]
        new_d = [0, 0, 0]
        new_d[i], new_d[j] = d[i], d[j]
        new_d[axis] = sign_a * abs(d[w])
        new_d[w] = 0

        pos = new_pos
        face_c2x, axis = new_face, new_axis
        d = new_d
        n_crossings += 1
        if record_vertices:
            vertices.append(tuple(pos))
            face_path.append(Face(face_c2x, axis))

        state = (face_c2x, tuple(pos), tuple(d))
        if anchor is None:
            anchor = state
            anchor_s = s_scaled
        else:
            if state == anchor:
                return _finish(
                    "closed", direction, vertices, sc,
                    s_scaled - anchor_s, face_path, center_visits, n_crossings,
                    closed=True, start_pos=start_pos,
                    record_vertices=record_vertices,
                )
            if state[2] == anchor[2]:
                diff = [pos[k] - anchor[1][k] for k in AXES]
                if all(v % two_sc == 0 for v in diff) and any(diff):
                    t = tuple(v // two_sc for v in diff)
                    return _finish(
                        "drift", direction, vertices, sc,
                        s_scaled - anchor_s, face_path, center_visits, n_crossings,
                        drift=t, start_pos=start_pos,
                        record_vertices=record_vertices,
                    )

        if bound_scaled is not None and s_scaled > bound_scaled:
            if margin_left == 0:
                return _finish(
                    "arc_bound", direction, vertices, sc, s_scaled,
                    face_path, center_visits, n_crossings,
                    record_vertices=record_vertices,
                )
            margin_left -= 1
        if n_crossings >= max_crossings:
            return _finish(
                "crossing_budget", direction, vertices, sc, s_scaled,
                face_path, center_visits, n_crossings,
                record_vertices=record_vertices,
            )


def _finish(
    reason, direction, vertices, sc, s_scaled, face_path, center_visits,
    n_crossings, *, closed=False, drift=None, cone=None, start_pos=None,
    record_vertices=True,
):
    def pt(v):
        return tuple(Fraction(c, sc) for c in v)

    out_vertices = []
    if record_vertices:
        if closed or drift is not None:
            # Trim to one period: from the start point back to its image.
            end = start_pos if closed else tuple(
                start_pos[k] + 2 * sc * drift[k] for k in AXES
            )
            out_vertices = [pt(v) for v in vertices[:n_crossings]] + [pt(end)]
        else:
            out_vertices = [pt(v) for v in vertices]

    visits = []
    seen = set()
    for c, dvec in center_visits:
        if c not in seen:
            seen.add(c)
            visits.append((pt(c), dvec))

    return Trajectory3D(
        direction=tuple(direction),
        vertices=out_vertices,
        closed=closed,
        drift_vector=drift,
        s_total=Fraction(s_scaled, sc),
        stop_reason=reason,
        cone_point=pt(cone) if cone else None,
        face_path=face_path if record_vertices else [],
        center_visits=visits,
        crossings=n_crossings,
    )


# ---------------------------------------------------------------------------
# Derived trajectory quantities
# ---------------------------------------------------------------------------

def trajectory_diameter(traj: Trajectory3D) -> Fraction:
    """Sup-norm diameter of a closed trajectory (max coordinate extent)."""
    if not traj.closed:
        raise ValueError("diameter is defined for closed trajectories only")
    return polyline_diameter(traj.vertices)


def polyline_diameter(vertices: Sequence[Sequence[Fraction]]) -> Fraction:
    if not vertices:
        return Fraction(0)
    return max(
        max(v[k] for v in vertices) - min(v[k] for v in vertices) for k in AXES
    )


def drift_vector(direction: tuple[int, int]) -> IntTriple:
    """The half-translation (in Z^3) that shifts the maximal strip of a
    drift-periodic direction onto itself.  Errors on periodic directions."""
    p, q = direction
    if gcd(abs(p), abs(q)) != 1:
        raise ValueError("direction must be primitive")
    if abs(p) % 2 == 1 and abs(q) % 2 == 1:
        start = Point3(SEED_FACE, SEED_CHART, Fraction(1, 2), Fraction(1, 3))
    else:
        start = Point3.face_center(SEED_FACE, SEED_CHART)
    budget = 400 * (abs(p) + abs(q)) + 800
    traj = trace3d(start, direction, max_crossings=budget, record_vertices=False)
    if traj.stop_reason == "closed":
        raise PeriodicDirectionError(f"direction {direction} is periodic")
    if traj.stop_reason != "drift":
        raise InternalGeometryError(
            f"drift trace for {direction} stopped with {traj.stop_reason}"
        )
    return traj.drift_vector  # type: ignore[return-value]


class PeriodicDirectionError(ValueError):
    """drift_vector was called on a periodic direction."""


def find_quarter_symmetry(traj: Trajectory3D) -> Optional[RigidMotion]:
    """An order-4 rigid motion cycling the four face centers of a closed core
    trajectory by a quarter period, or None if no certificate exists."""
    if not traj.closed or len(traj.center_visits) != 4:
        return None
    centers = [c for c, _ in traj.center_visits]
    dirs = [d for _, d in traj.center_visits]
    for rot in QUARTER_TURNS:
        img = mat_vec(rot, centers[0])
        tt = [(centers[1][k] - img[k]) for k in AXES]
        if any(v.denominator != 1 or v.numerator % 2 for v in map(Fraction, tt)):
            continue
        g = RigidMotion(rot, tuple(int(v) // 2 for v in tt))
        ok = all(
            g.apply_point(centers[m]) == centers[(m + 1) % 4]
            and mat_vec(rot, dirs[m]) == dirs[(m + 1) % 4]
            for m in range(4)
        )
        if ok and g.order() == 4:
            return g
    return None


# ---------------------------------------------------------------------------
# The twist operation on slopes and the exact length of twisted trajectories
# ---------------------------------------------------------------------------

INFINITE_SLOPE = None  # slope of a direction parallel to the twisting axis "vertical"

Slope = Optional[Fraction]  # None encodes the infinite slope


def twist_slope(s: Slope, axis: str, k: int) -> Slope:
    """Slope of the k-fold twist of a trajectory of slope ``s`` around the
    cylinders of the vertical or horizontal axis direction."""
    if axis not in ("vertical", "horizontal"):
        raise ValueError("axis must be 'vertical' or 'horizontal'")
    if k == 0:
        return s
    if axis == "vertical":
        if s is INFINITE_SLOPE:
            raise ValueError("slope is parallel to the vertical axis")
        return 4 * k + Fraction(s)
    if s == 0:
        raise ValueError("slope is parallel to the horizontal axis")
    inv = Fraction(0) if s is INFINITE_SLOPE else 1 / Fraction(s)
    denom = 4 * k + inv
    if denom == 0:
        return INFINITE_SLOPE
    return 1 / denom


def _as_sqrt(x) -> SqrtLength:
    return x if isinstance(x, SqrtLength) else SqrtLength.of(x)


def twist_length_prediction(
    len_v,
    wid_v,
    pair: tuple[tuple[int, int], tuple[int, int]],
    k: int,
    len_o,
) -> SqrtLength:
    """Exact length of the k-fold twist of a closed trajectory around the
    cylinders of a transverse periodic direction.

    ``pair`` is (direction of the twisting cylinders V, direction of the
    trajectory); the sine and cotangent of the angle between them are handled
    through the integer components, so the result is an exact square root.
    """
    (va, vb), (oa, ob) = pair
    cross = va * ob - vb * oa
    if cross == 0:
        raise ValueError("directions must be transverse")
    dot = va * oa + vb * ob
    nv = va * va + vb * vb
    no = oa * oa + ob * ob
    lv = _as_sqrt(len_v).multiplier_of_sqrt(nv)
    wv = _as_sqrt(wid_v).multiplier_of_sqrt(nv)
    lo = _as_sqrt(len_o).multiplier_of_sqrt(no)
    mu = k * lv + Fraction(dot, abs(cross)) * wv
    value_sq = Fraction(cross * cross) * lo * lo / (wv * wv) * (wv * wv + mu * mu) / nv
    return SqrtLength(value_sq)


def twist_length_ratio_sq(
    len_v, wid_v, pair, k: int, len_o
) -> Fraction:
    """(predicted length / asymptotic model)^2, an exact rational.

    The asymptotic model is k * sin(theta) * (len V / wid V) * len O; the
    ratio tends to 1 as k grows.
    """
    (va, vb), (oa, ob) = pair
    cross = va * ob - vb * oa
    dot = va * oa + vb * ob
    nv = va * va + vb * vb
    lv = _as_sqrt(len_v).multiplier_of_sqrt(nv)
    wv = _as_sqrt(wid_v).multiplier_of_sqrt(nv)
    mu = k * lv + Fraction(dot, abs(cross)) * wv
    return (wv * wv + mu * mu) / (k * k * lv * lv)
