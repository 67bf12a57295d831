"""The 3D model: faces, cone points, rigid motions, exact tracing, twists."""

import itertools
import random
from fractions import Fraction

import pytest

from mucube.exact import SqrtLength
from mucube.mucube3d import (
    AXES,
    IN_PLANE,
    ConePointStart,
    Face,
    IDENTITY_ROT,
    Point3,
    QUARTER_TURNS,
    QUARTER_X,
    QUARTER_Y,
    QUARTER_Z,
    RigidMotion,
    ROT3_XYZ,
    SEED_CHART,
    SEED_FACE,
    cone_points_in_box,
    default_chart,
    drift_vector,
    face_patch_in_surface,
    faces_in_box,
    find_quarter_symmetry,
    incident_faces,
    is_face,
    mat_mul,
    PeriodicDirectionError,
    point_in_surface,
    polyline_diameter,
    rotation_group,
    trace3d,
    trajectory_diameter,
    twist_length_prediction,
    twist_length_ratio_sq,
    twist_slope,
)


def center_start():
    return Point3.face_center(SEED_FACE, SEED_CHART)


# ---------------------------------------------------------------------------
# Face predicate: derived characterization against the point-set oracle
# ---------------------------------------------------------------------------

def iter_candidates(lo, hi):
    for axis in AXES:
        i, j = IN_PLANE[axis]
        for av in range(2 * lo + 1, 2 * hi, 2):
            for iv in range(2 * lo, 2 * hi + 1, 2):
                for jv in range(2 * lo, 2 * hi + 1, 2):
                    c = [0, 0, 0]
                    c[axis], c[i], c[j] = av, iv, jv
                    yield tuple(c), axis


def test_face_predicate_matches_pointwise_oracle_on_window():
    # The integer characterization must be re-derivable from the set
    # definition; they agree on every candidate in a [-5, 5] window.
    for c, axis in iter_candidates(-5, 5):
        assert is_face(c, axis) == face_patch_in_surface(c, axis), (c, axis)


@pytest.mark.parametrize(
    "center2x, axis, expected",
    [((0, 2, 1), 2, True), ((0, 0, 1), 2, False), ((1, 0, 0), 0, False)],
)
def test_face_examples(center2x, axis, expected):
    assert is_face(center2x, axis) is expected
    assert face_patch_in_surface(center2x, axis) is expected


def test_faces_in_box_counts():
    assert len(faces_in_box((-1, -1, -1), (1, 1, 1))) == 12
    assert len(faces_in_box((-1, -1, -1), (3, 1, 1))) == 24
    # Every translated 2x2x2 box holds exactly 12 faces.
    rng = random.Random(0)
    for _ in range(10):
        lo = tuple(rng.randrange(-6, 6) for _ in range(3))
        hi = tuple(v + 2 for v in lo)
        assert len(faces_in_box(lo, hi)) == 12


def test_faces_in_box_by_enumeration():
    expected = {
        (c, axis)
        for c, axis in iter_candidates(0, 1)
        if 0 <= c[0] < 2 and 0 <= c[1] < 2 and 0 <= c[2] < 2 and is_face(c, axis)
    }
    got = {(f.center2x, f.axis) for f in faces_in_box((0, 0, 0), (1, 1, 1))}
    assert got == expected


def test_empty_box():
    assert faces_in_box((0, 0, 0), (0, 1, 1)) == frozenset()


def test_cone_points():
    pts = cone_points_in_box((-1, -1, -1), (1, 1, 1))
    assert len(pts) == 8
    for c in pts:
        assert all(v % 2 == 1 for v in c)
        assert len(incident_faces(c)) == 6
    # Any corner of any face in a window is a cone point with 6 faces.
    for f in faces_in_box((-2, -2, -2), (2, 2, 2)):
        i, j = f.in_plane_axes()
        for di, dj in itertools.product((-1, 1), repeat=2):
            corner = list(f.center2x)
            corner[i] += di
            corner[j] += dj
            assert len(incident_faces(corner)) == 6


# ---------------------------------------------------------------------------
# Rigid motions
# ---------------------------------------------------------------------------

def test_rotation_group_and_quarter_turns():
    group = rotation_group()
    assert len(group) == 24
    assert len(QUARTER_TURNS) == 6


def test_motion_composition_law():
    rng = random.Random(1)
    group = rotation_group()
    for _ in range(50):
        g1 = RigidMotion(rng.choice(group), tuple(rng.randrange(-3, 4) for _ in range(3)))
        g2 = RigidMotion(rng.choice(group), tuple(rng.randrange(-3, 4) for _ in range(3)))
        p = tuple(Fraction(rng.randrange(-8, 8), 2) for _ in range(3))
        assert g1.compose(g2).apply_point(p) == g1.apply_point(g2.apply_point(p))
        gi = g1.inverse()
        assert gi.apply_point(g1.apply_point(p)) == p


def test_motions_preserve_faces():
    faces = sorted(faces_in_box((-2, -2, -2), (2, 2, 2)))
    gens = [
        RigidMotion(QUARTER_X),
        RigidMotion(QUARTER_Y),
        RigidMotion(QUARTER_Z),
        RigidMotion(ROT3_XYZ),
        RigidMotion(IDENTITY_ROT, (1, 0, 0)),
        RigidMotion(IDENTITY_ROT, (0, 1, 0)),
        RigidMotion(IDENTITY_ROT, (0, 0, 1)),
    ]
    rng = random.Random(2)
    motions = list(gens)
    for _ in range(41):
        motions.append(rng.choice(gens).compose(rng.choice(motions)))
    for g in motions:
        for f in faces:
            g.apply_face(f)  # raises on failure


def test_torsion_orders():
    # Torsion elements have order 1, 2, 3 or 4; elements with a nonzero
    # translation along the rotation axis are of infinite order.
    rng = random.Random(3)
    group = rotation_group()
    orders = {RigidMotion(IDENTITY_ROT).order()}
    for _ in range(200):
        g = RigidMotion(rng.choice(group), tuple(rng.randrange(-2, 3) for _ in range(3)))
        n = g.order(cap=12)
        if n is not None:
            orders.add(n)
    assert orders <= {1, 2, 3, 4}
    assert {1, 2, 3, 4} <= orders


def test_quarter_turn_applied_to_face():
    g = RigidMotion(QUARTER_Z)
    img = g.apply_face(Face((0, 2, 1), 2))
    assert is_face(img.center2x, img.axis)


def test_translation_moves_faces_two_units():
    g = RigidMotion(IDENTITY_ROT, (1, 0, 0))
    for f in faces_in_box((-1, -1, -1), (1, 1, 1)):
        img = g.apply_face(f)
        assert img.center2x == (f.center2x[0] + 4, f.center2x[1], f.center2x[2])


# ---------------------------------------------------------------------------
# Tracing
# ---------------------------------------------------------------------------

def test_horizontal_core_orbit():
    t = trace3d(center_start(), (1, 0))
    assert t.closed and t.stop_reason == "closed"
    assert t.s_total == 4
    assert t.arc_length == SqrtLength.of(4, 1)
    assert len(t.center_visits) == 4
    assert t.vertices[0] == t.vertices[-1]
    assert find_quarter_symmetry(t) is not None


def test_slope_quarter_orbit_closes():
    t = trace3d(center_start(), (4, 1), max_arc_s=Fraction(4), margin_crossings=1)
    assert t.closed
    assert t.arc_length == SqrtLength.of(4, 17)
    assert len(t.center_visits) == 4


def test_one_two_drifts():
    t = trace3d(center_start(), (1, 2))
    assert not t.closed and t.stop_reason == "drift"
    assert t.drift_vector is not None and t.drift_vector != (0, 0, 0)
    # The trajectory ends at the start translated by twice the drift vector.
    expect = tuple(
        t.vertices[0][k] + 2 * t.drift_vector[k] for k in range(3)
    )
    assert t.vertices[-1] == expect


def test_segmentwise_shape():
    t = trace3d(center_start(), (4, 1))
    for a, b in zip(t.vertices, t.vertices[1:]):
        # each segment lies in a coordinate plane (one coordinate frozen)
        assert sum(1 for k in range(3) if a[k] == b[k]) >= 1


def test_edge_start_rejected():
    with pytest.raises(ConePointStart):
        trace3d(Point3(SEED_FACE, SEED_CHART, Fraction(0), Fraction(1, 2)), (1, 0))


def test_odd_odd_center_start_hits_cone_point():
    t = trace3d(center_start(), (1, 1))
    assert t.stop_reason == "cone_point"
    assert t.cone_point is not None
    assert all(2 * c % 2 == 1 for c in t.cone_point)


def _chart_direction(face, traj, k):
    """Primitive chart components of segment k's ambient tangent."""
    from math import gcd

    a, b = traj.vertices[k], traj.vertices[k + 1]
    amb = [x - y for x, y in zip(b, a)]
    u, v = default_chart(face)
    p = sum(amb[m] * u[m] for m in range(3))
    q = sum(amb[m] * v[m] for m in range(3))
    den = p.denominator * q.denominator
    pi, qi = int(p * den), int(q * den)
    g = gcd(abs(pi), abs(qi))
    return (pi // g, qi // g)


def test_retrace_reproduces_cycle():
    # Re-tracing a closed trajectory from an interior point of any of its
    # segments reproduces the same crossing points, cyclically rotated.
    # (Edge points themselves are rejected as starts by design.)
    t41 = trace3d(center_start(), (4, 1))
    assert t41.closed
    crossings = t41.vertices[1:-1]
    n = len(crossings)
    for k in range(len(t41.vertices) - 1):
        a, b = t41.vertices[k], t41.vertices[k + 1]
        mid = tuple((x + y) / 2 for x, y in zip(a, b))
        face = t41.face_path[k]
        restart = Point3.from_ambient(face, default_chart(face), mid)
        t2 = trace3d(restart, _chart_direction(face, t41, k))
        assert t2.closed
        got = t2.vertices[1:-1]
        assert len(got) == n
        rotated = crossings[k:] + crossings[:k]
        assert got == rotated


def test_periodic_length_law_sample():
    # every closed face-center trajectory has parameter length exactly 4 and
    # passes through exactly 4 face centers
    rng = random.Random(5)
    from math import gcd

    count = 0
    while count < 12:
        p = rng.randrange(1, 16)
        q = rng.randrange(0, 16)
        if gcd(p, q) != 1:
            continue
        t = trace3d(center_start(), (p, q), max_crossings=40000)
        if t.stop_reason != "closed":
            continue
        count += 1
        assert t.s_total == 4
        assert len(t.center_visits) == 4
        assert find_quarter_symmetry(t) is not None


def test_drift_law_revisit_translation():
    from math import gcd

    rng = random.Random(6)
    count = 0
    while count < 12:
        p = rng.randrange(1, 20)
        q = rng.randrange(1, 20)
        if gcd(p, q) != 1 or (p % 2 and q % 2):
            continue
        t = trace3d(center_start(), (p, q), max_crossings=60000)
        if t.stop_reason != "drift":
            continue
        count += 1
        v = t.drift_vector
        assert v != (0, 0, 0)
        assert t.vertices[-1] == tuple(
            t.vertices[0][k] + 2 * v[k] for k in range(3)
        )


def test_drift_vector_function():
    assert drift_vector((1, 2)) != (0, 0, 0)
    assert drift_vector((1, 1)) != (0, 0, 0)
    assert drift_vector((5, 2)) != (0, 0, 0)
    with pytest.raises(PeriodicDirectionError):
        drift_vector((1, 0))


# ---------------------------------------------------------------------------
# Diameter and twists
# ---------------------------------------------------------------------------

def test_diameter_of_horizontal_core():
    t = trace3d(center_start(), (1, 0))
    # The core loop spans one unit in each of two coordinates.
    assert trajectory_diameter(t) == 1


def test_diameter_degenerate_polyline():
    assert polyline_diameter([(Fraction(0), Fraction(0), Fraction(0))]) == 0
    assert polyline_diameter([]) == 0


def test_diameter_requires_closed():
    t = trace3d(center_start(), (1, 2))
    with pytest.raises(ValueError):
        trajectory_diameter(t)


def test_alternating_twists_grow_diameter_by_two():
    # Alternate twisting around the vertical and horizontal axis directions,
    # starting from the horizontal trajectory; diameters grow by exactly 2.
    slope = Fraction(0)
    dirs = []
    for k in range(5):
        axis = "vertical" if k % 2 == 0 else "horizontal"
        slope = twist_slope(slope, axis, 1)
        dirs.append((slope.denominator, slope.numerator))
    diams = [trajectory_diameter(trace3d(center_start(), d, max_crossings=40000))
             for d in dirs]
    for a, b in zip(diams, diams[1:]):
        assert b - a == 2
    assert all(b > a for a, b in zip(diams, diams[1:]))


def test_twist_slope_values():
    assert twist_slope(Fraction(0), "vertical", 1) == 4
    assert twist_slope(Fraction(1, 2), "vertical", 0) == Fraction(1, 2)
    assert twist_slope(Fraction(1, 4), "vertical", 1) == Fraction(17, 4)
    assert twist_slope(None, "horizontal", 1) == Fraction(1, 4)
    with pytest.raises(ValueError):
        twist_slope(None, "vertical", 1)
    with pytest.raises(ValueError):
        twist_slope(Fraction(0), "horizontal", 2)


def test_twist_length_matches_trace():
    # k-fold twist of the vertical trajectory around horizontal cylinders has
    # slope 1/(4k); its length must match the traced arc length exactly.
    for k in (1, 2, 3):
        pred = twist_length_prediction(4, 1, ((1, 0), (0, 1)), k, 4)
        t = trace3d(center_start(), (4 * k, 1), max_crossings=20000)
        assert t.closed
        assert pred == t.arc_length


def test_twist_length_identity_at_zero():
    assert twist_length_prediction(4, 1, ((1, 0), (0, 1)), 0, 4) == SqrtLength.of(4, 1)


def test_twist_length_asymptotic_ratio():
    for k in (10**3, 10**6):
        ratio_sq = twist_length_ratio_sq(4, 1, ((1, 0), (0, 1)), k, 4)
        eps = Fraction(1, 1000)
        assert (1 - eps) ** 2 < ratio_sq < (1 + eps) ** 2


def test_twist_length_general_pair():
    # For a non-axis cylinder direction the exact closed form must still be a
    # clean square root; cross-check against a traced twisted orbit.
    # V = (4,1) (periodic), O = (0,1): slopes: twisting the vertical orbit.
    nv = 17
    len_v = SqrtLength.of(4, nv)
    wid_v = SqrtLength.of(Fraction(1, nv), nv)
    pred = twist_length_prediction(len_v, wid_v, ((4, 1), (0, 1)), 1, 4)
    assert pred.sq.denominator == 1 or pred.sq > 0
