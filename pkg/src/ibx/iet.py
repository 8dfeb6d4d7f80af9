"""Normal-coordinate orbit solver for integer interval exchanges.

An interval exchange on ``{0, .., N-1}`` cuts the domain into translated
pieces.  Gluing the top of a rectangle to its bottom by that exchange (and
the left side to the right) yields a flat surface on which the vertical
lines through the integer points close up into disjoint simple curves.
Following one curve upward from the central horizontal edge for one period
advances the intersection point by exactly one application of the map, so
the n-th iterate of any point can be read off a single traced curve with
modular arithmetic instead of n successive applications.

The surface is triangulated so that the curve is a normal curve: inside a
triangle it runs corner to corner, and its intersections with an edge are
identified purely by their count and position.  Tracing therefore needs
only the per-edge crossing counts, never floating-point geometry.

Coordinates: x is doubled (``x2 = 2 * x``) so that all triangulation
vertices sit at odd x2 while the traced verticals sit at even x2; rows are
the integer heights ``-s .. s``.  Every edge is recorded oriented
left-to-right, with vertical edges bottom-to-top.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .plb import PiecewiseLinearBijection, apply_plb

__all__ = [
    "IetError",
    "Point",
    "Triangle",
    "Port",
    "Edge",
    "TriangulatedSurface",
    "Crossing",
    "Arc",
    "IetSurface",
    "build_surface",
    "normal_coords_vertical",
    "validate_normal_coords",
    "trace_step",
    "arc_of",
    "iet_orbit_solve",
    "three_gap_check",
    "three_gap_max_distinct",
]


class IetError(ValueError):
    """Raised for malformed exchanges or surfaces that fail validation."""


# A vertex: (x2, y) with x2 the doubled horizontal coordinate.
Point = Tuple[int, int]


@dataclass(frozen=True)
class Triangle:
    """Corner points in counterclockwise order."""

    vertices: Tuple[Point, Point, Point]

    def side(self, i: int) -> Tuple[Point, Point]:
        """Directed side i, from vertex i to vertex i + 1."""
        return self.vertices[i], self.vertices[(i + 1) % 3]


class Port(NamedTuple):
    """One attachment of an edge to a triangle side.

    aligned is True when the side's counterclockwise direction agrees with
    the edge's canonical (left-to-right / bottom-to-top) orientation.
    """

    triangle: int
    side: int
    aligned: bool


@dataclass(frozen=True)
class Edge:
    """A glued edge of the surface.

    Boundary identifications are resolved before edges are interned, so
    every edge has exactly two ports and the key names its canonical
    geometric representative.
    """

    key: Tuple[Point, Point]
    crossings: int
    ports: Tuple[Port, Port]


@dataclass(frozen=True)
class TriangulatedSurface:
    triangles: Tuple[Triangle, ...]
    edges: Tuple[Edge, ...]
    # side_edges[t][i] = edge id of triangle t's side i
    side_edges: Tuple[Tuple[int, int, int], ...]
    # side_counts[t] = crossing counts of the three sides, for tracing
    side_counts: Tuple[Tuple[int, int, int], ...]


class Crossing(NamedTuple):
    """One intersection of the traced curve with an edge.

    index counts along the edge's canonical orientation, 0-based.
    """

    edge: int
    index: int


@dataclass(frozen=True)
class Arc:
    """A closed component of the traced curve.

    states lists (crossing, entering-port) pairs in trace order; the arc
    closes from the last state back to the first.
    """

    states: Tuple[Tuple[Crossing, int], ...]
    central_positions: Dict[int, int]

    @property
    def length(self) -> int:
        return len(self.states)


@dataclass
class IetSurface:
    """A built surface together with its tracing bookkeeping.

    period is the uniform number of trace steps between consecutive
    central-edge crossings; it is measured from the surface, not assumed.
    """

    transform: PiecewiseLinearBijection
    surface: TriangulatedSurface
    central: int
    up_port: int
    stripes: int
    period: int
    _arcs: Dict[int, Arc] = field(default_factory=dict, repr=False)

    @property
    def width(self) -> int:
        return self.transform.domain


def _as_exchange(transform: PiecewiseLinearBijection) -> PiecewiseLinearBijection:
    if any(p.mult != 1 for p in transform.pieces):
        raise IetError("not an interval exchange: some piece scales")
    return transform


def _thinned_levels(interior: List[int], stripes: int) -> List[List[int]]:
    """Cut positions per row, from the unsubdivided row 0 out to row s.

    Each thinning keeps every other cut, so each coarse segment contains
    at most one finer cut and s halvings erase all of them.
    """
    levels: List[List[int]] = [[] for _ in range(stripes + 1)]
    levels[stripes] = list(interior)
    for r in range(stripes, 0, -1):
        levels[r - 1] = levels[r][1::2]
    if levels[0]:
        raise IetError("central row still subdivided; too few stripes")
    return levels


def _emit_stripe(
    triangles: List[Triangle],
    coarse: Sequence[int],
    fine: Sequence[int],
    n2: int,
    y_lo: int,
    y_hi: int,
    split_top: bool,
) -> None:
    """Triangulate one horizontal stripe.

    Cells are bounded by verticals at the coarse cuts; the finer row adds
    at most one extra cut per cell, on the top boundary for the upper half
    and on the bottom for the mirrored lower half.
    """
    bounds = [-1] + list(coarse) + [n2 - 1]
    extra = [c for c in fine if c not in set(coarse)]
    pos = 0
    for a, b in zip(bounds, bounds[1:]):
        mids = []
        while pos < len(extra) and extra[pos] < b:
            if extra[pos] > a:
                mids.append(extra[pos])
            pos += 1
        if not mids:
            triangles.append(Triangle(((a, y_lo), (b, y_lo), (b, y_hi))))
            triangles.append(Triangle(((a, y_lo), (b, y_hi), (a, y_hi))))
            continue
        if len(mids) > 1:
            raise IetError("stripe cell split more than once")
        (m,) = mids
        if split_top:
            triangles.append(Triangle(((a, y_lo), (b, y_lo), (m, y_hi))))
            triangles.append(Triangle(((a, y_lo), (m, y_hi), (a, y_hi))))
            triangles.append(Triangle(((b, y_lo), (b, y_hi), (m, y_hi))))
        else:
            triangles.append(Triangle(((a, y_lo), (m, y_lo), (a, y_hi))))
            triangles.append(Triangle(((m, y_lo), (b, y_hi), (a, y_hi))))
            triangles.append(Triangle(((m, y_lo), (b, y_lo), (b, y_hi))))


def _canonical_side(
    v1: Point, v2: Point, n2: int, stripes: int, images: Sequence[Tuple[int, int, int]]
) -> Tuple[Point, Point]:
    """Map a directed side into the frame of its glued partner.

    The right boundary column translates onto the left one; each bottom
    boundary segment is an output interval and translates onto its piece's
    input segment on the top.  Interior sides pass through unchanged.
    """
    if v1[0] == n2 - 1 and v2[0] == n2 - 1:
        return (-1, v1[1]), (-1, v2[1])
    if v1[1] == -stripes and v2[1] == -stripes:
        lo = min(v1[0], v2[0])
        hi = max(v1[0], v2[0])
        for img_lo, img_hi, off in images:
            if img_lo <= lo and hi <= img_hi:
                shift = 2 * off
                return (v1[0] - shift, stripes), (v2[0] - shift, stripes)
        raise IetError("bottom boundary segment matches no output interval")
    return v1, v2


def build_surface(
    transform: PiecewiseLinearBijection, check_trace: bool = True
) -> IetSurface:
    """Triangulate the glued rectangle of an interval exchange.

    The rectangle spans x in [-1/2, N - 1/2] with s stripes of triangles
    above and below an unsubdivided full-width central edge, where
    s = max(1, ceil(log2 k)) for k pieces.  The input interval endpoints
    subdivide the top boundary and the output endpoints the bottom one;
    each row inward keeps every other cut so the subdivision dies out by
    the central row.

    With check_trace (the default) the curve through every integer point
    is traced one full period and required to land on the image point,
    which also confirms the period is uniform.
    """
    t = _as_exchange(transform)
    n = t.domain
    n2 = 2 * n
    k = len(t.pieces)
    stripes = max(1, (k - 1).bit_length())

    input_cuts = [2 * p.lo - 1 for p in t.pieces[1:]]
    output_cuts = [2 * v - 1 for v in sorted(p.lo + p.off for p in t.pieces)[1:]]
    up = _thinned_levels(input_cuts, stripes)
    down = _thinned_levels(output_cuts, stripes)

    triangles: List[Triangle] = []
    for r in range(1, stripes + 1):
        _emit_stripe(triangles, up[r - 1], up[r], n2, r - 1, r, split_top=True)
        _emit_stripe(triangles, down[r - 1], down[r], n2, -r, -r + 1, split_top=False)

    images = [
        (2 * (p.lo + p.off) - 1, 2 * (p.hi + p.off) - 1, p.off) for p in t.pieces
    ]

    # Intern edges: canonicalize glued sides, then demand exactly two ports
    # per edge with opposite alignment (an orientable gluing).
    registry: Dict[Tuple[Point, Point], List[Port]] = {}
    for ti, tri in enumerate(triangles):
        for si in range(3):
            v1, v2 = tri.side(si)
            w1, w2 = _canonical_side(v1, v2, n2, stripes, images)
            key = (w1, w2) if w1 < w2 else (w2, w1)
            registry.setdefault(key, []).append(Port(ti, si, w1 < w2))

    edges: List[Edge] = []
    side_to_edge: Dict[Tuple[int, int], int] = {}
    for key in sorted(registry):
        ports = registry[key]
        if len(ports) != 2:
            raise IetError(f"edge {key} glued {len(ports)} times, expected 2")
        if ports[0].aligned == ports[1].aligned:
            raise IetError(f"edge {key} glued without flipping orientation")
        count = abs(key[1][0] - key[0][0]) // 2
        eid = len(edges)
        edges.append(Edge(key, count, (ports[0], ports[1])))
        for p in ports:
            side_to_edge[(p.triangle, p.side)] = eid

    side_edges = tuple(
        (side_to_edge[(ti, 0)], side_to_edge[(ti, 1)], side_to_edge[(ti, 2)])
        for ti in range(len(triangles))
    )
    side_counts = tuple(
        tuple(edges[e].crossings for e in trio) for trio in side_edges
    )
    surface = TriangulatedSurface(
        tuple(triangles), tuple(edges), side_edges, side_counts
    )
    validate_normal_coords(surface, normal_coords_vertical(surface))

    central_key = ((-1, 0), (n2 - 1, 0))
    central = next(
        (i for i, e in enumerate(edges) if e.key == central_key), None
    )
    if central is None or edges[central].crossings != n:
        raise IetError("central edge missing or with wrong crossing count")
    up_port = next(
        pi
        for pi, p in enumerate(edges[central].ports)
        if any(v[1] > 0 for v in triangles[p.triangle].vertices)
    )

    su = IetSurface(t, surface, central, up_port, stripes, period=0)
    su.period = _measure_period(su)
    if check_trace:
        _check_trace_agreement(su)
    return su


def _measure_period(su: IetSurface) -> int:
    """Steps between consecutive central crossings, measured by tracing."""
    limit = 40 * su.stripes + 40
    state = (Crossing(su.central, 0), su.up_port)
    for steps in range(1, limit + 1):
        state = trace_step(su, *state)
        if state[0].edge == su.central:
            return steps
    raise IetError("trace failed to return to the central edge")


def _check_trace_agreement(su: IetSurface) -> None:
    """Trace one period from every integer point and compare with the map.

    Confirms the period is uniform over all crossings and that the curve
    implements the exchange: d steps upward from central crossing i land
    on central crossing T(i), entering upward again.
    """
    for i in range(su.width):
        state = (Crossing(su.central, i), su.up_port)
        for step in range(su.period):
            state = trace_step(su, *state)
            on_central = state[0].edge == su.central
            if on_central != (step == su.period - 1):
                raise IetError(f"nonuniform period at crossing {i}")
        expected = apply_plb(su.transform, i)
        if state[0].index != expected or state[1] != su.up_port:
            raise IetError(
                f"trace maps {i} to {state[0].index}, exchange maps it to {expected}"
            )


def normal_coords_vertical(surface: TriangulatedSurface) -> Tuple[int, ...]:
    """Crossing count of each edge with the union of integer verticals.

    Vertices sit at odd doubled coordinates and the verticals at even
    ones, so an edge spanning [a, b] in x2 is crossed (b - a) / 2 times
    and vertical edges are never crossed.
    """
    return tuple(abs(e.key[1][0] - e.key[0][0]) // 2 for e in surface.edges)


def validate_normal_coords(
    surface: TriangulatedSurface, coords: Sequence[int]
) -> Tuple[Tuple[int, int, int], ...]:
    """Check coords describe a normal curve; return per-corner arc counts.

    In each triangle the three counts must have an even sum and satisfy
    the triangle inequality; the count of arcs rounding the corner at
    vertex i is then (N(i-1) + N(i) - N(i+1)) / 2 with side i running from
    vertex i to vertex i + 1.
    """
    if len(coords) != len(surface.edges):
        raise IetError("one coordinate per edge required")
    if any(c < 0 for c in coords):
        raise IetError("negative crossing count")
    corners: List[Tuple[int, int, int]] = []
    for ti, trio in enumerate(surface.side_edges):
        ns = tuple(coords[e] for e in trio)
        if sum(ns) % 2:
            raise IetError(f"odd crossing total in triangle {ti}")
        cs = tuple((ns[i - 1] + ns[i] - ns[(i + 1) % 3]) // 2 for i in range(3))
        if any(c < 0 for c in cs):
            raise IetError(f"triangle inequality fails in triangle {ti}")
        corners.append(cs)
    return tuple(corners)


def trace_step(
    su: IetSurface, crossing: Crossing, entering: int
) -> Tuple[Crossing, int]:
    """Advance the curve through one triangle.

    entering names the port of the crossing's edge about to be entered.
    Inside the triangle the a(v) arcs nearest a corner v pair up
    innermost-first across its two sides: entering side i at position p
    (from the side's start vertex) exits side i - 1 at N(i-1) - 1 - p when
    p < a(start of side i), otherwise side i + 1 at N(i) - 1 - p.

    Returns the next crossing and the port to enter after it.  Stepping
    from the result with the opposite port undoes the step.
    """
    edge = su.surface.edges[crossing.edge]
    tri, side, aligned = edge.ports[entering]
    counts = su.surface.side_counts[tri]
    p = crossing.index if aligned else edge.crossings - 1 - crossing.index
    at_start = (counts[side - 1] + counts[side] - counts[(side + 1) % 3]) // 2
    if p < at_start:
        out_side = (side - 1) % 3
        q = counts[out_side] - 1 - p
    else:
        out_side = (side + 1) % 3
        q = counts[side] - 1 - p
    out_id = su.surface.side_edges[tri][out_side]
    out_edge = su.surface.edges[out_id]
    out_port = 0 if out_edge.ports[0][:2] == (tri, out_side) else 1
    index = q if out_edge.ports[out_port].aligned else out_edge.crossings - 1 - q
    return Crossing(out_id, index), 1 - out_port


def arc_of(su: IetSurface, i: int) -> Arc:
    """The closed curve component through central crossing i, memoized.

    Its length is d times the size of i's orbit under the exchange, and
    its central crossings, every d-th state, enumerate that orbit.
    """
    if not 0 <= i < su.width:
        raise IetError(f"point {i} outside [0, {su.width})")
    cached = su._arcs.get(i)
    if cached is not None:
        return cached
    start = (Crossing(su.central, i), su.up_port)
    states: List[Tuple[Crossing, int]] = []
    positions: Dict[int, int] = {}
    state = start
    while True:
        if state[0].edge == su.central:
            positions[state[0].index] = len(states)
        states.append(state)
        state = trace_step(su, *state)
        if state == start:
            break
    arc = Arc(tuple(states), positions)
    for member in positions:
        su._arcs[member] = arc
    return arc


def iet_orbit_solve(
    transform: PiecewiseLinearBijection,
    i: int,
    n: int,
    surface: Optional[IetSurface] = None,
) -> int:
    """The n-th iterate of i under an interval exchange, without iterating.

    Traces the closed curve through i once (length ell, linear work), then
    jumps n crossings' worth ahead by computing (position + n * d) mod ell,
    so n may be astronomically large; negative n walks backward.  Passing
    a prebuilt surface skips rebuilding and shares the arc cache.
    """
    su = surface if surface is not None else build_surface(transform)
    if su.transform.domain != transform.domain:
        raise IetError("surface built for a different exchange")
    arc = arc_of(su, i)
    pos = arc.central_positions[i]
    target, _ = arc.states[(pos + n * su.period) % arc.length]
    if target.edge != su.central:
        raise IetError("period jump left the central edge")
    return target.index


def three_gap_check(modulus: int, step: int, count: int) -> Tuple[int, ...]:
    """Distinct cyclic gaps of the first count multiples of step mod modulus.

    The three-distance theorem bounds the result at three values; this
    computes, it does not assume.  Repeated points are collapsed before
    gaps are taken.
    """
    if modulus < 1 or count < 1:
        raise IetError("modulus and count must be positive")
    points = sorted({(j * step) % modulus for j in range(count)})
    if len(points) == 1:
        return (modulus,)
    gaps = {
        (b - a) % modulus or modulus
        for a, b in zip(points, points[1:] + points[:1])
    }
    return tuple(sorted(gaps))


def three_gap_max_distinct(modulus: int, step: int, limit: int) -> int:
    """Largest distinct-gap count over all prefixes count = 1 .. limit.

    Incremental: each new point splits one cyclic gap in two, so a full
    sweep costs one insertion per distinct point instead of a sort per
    prefix.
    """
    if modulus < 1 or limit < 1:
        raise IetError("modulus and limit must be positive")
    points: List[int] = [0]
    gaps: Counter = Counter({modulus: 1})
    worst = 1
    value = 0
    for _ in range(limit - 1):
        value = (value + step) % modulus
        pos = bisect_left(points, value)
        if pos < len(points) and points[pos] == value:
            break  # the orbit has closed; later prefixes repeat
        before = points[pos - 1]
        after = points[pos % len(points)]
        old = (after - before) % modulus or modulus
        gaps[old] -= 1
        if not gaps[old]:
            del gaps[old]
        gaps[(value - before) % modulus or modulus] += 1
        gaps[(after - value) % modulus or modulus] += 1
        insort(points, value)
        worst = max(worst, len(gaps))
    return worst
