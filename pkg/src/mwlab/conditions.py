"""Structural condition checks: branch points, cograph separation, the open
set condition, and the hypothesis bundle for simplicity and pure infiniteness
of the associated algebra.

Branch detection runs two complementary routes per parallel edge pair. The
sampled route scans the computed cloud for near-coincidences at the requested
tolerance. Because every edge map is affine, the coincidence equation
phi_e(y) = phi_f(y) is also solved exactly as a linear system; a solution that
lands within the cloud's certified resolution yields an exact witness whose
coordinates do not depend on the sampling depth. Reported branch points prefer
the exact witness.

Only pairs sharing both source and range are compared: components at distinct
vertices are disjoint by the labeling convention, so no coincidence can occur
across them.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import SpecValidationError
from .geometry import (
    ConvexPolygon,
    Interval,
    LabeledPoint,
    interval_in_union,
    intervals_disjoint,
    polygon_in_union,
    polygons_disjoint,
)
from .graph import has_sinks_or_sources, is_irreducible

__all__ = [
    "BranchPoint",
    "BranchReport",
    "SeparationResult",
    "OscResult",
    "Verdict",
    "HypothesisReport",
    "branch_points",
    "branch_index",
    "graph_separation",
    "open_set_condition",
    "simplicity_report",
]

_RANK_CUTOFF = 1e-10


@dataclass(frozen=True)
class BranchPoint:
    """A coincidence x = phi_e(y) = phi_f(y) for at least two distinct edges."""

    x: LabeledPoint
    y: LabeledPoint
    edges: tuple
    index: int
    certified: bool


@dataclass
class BranchReport:
    branch_points: list
    min_cograph_gap: float
    tol: float
    sample_depth: int
    has_parallel_pairs: bool
    sampled_min_gap: float
    scan_resolution_sufficient: bool
    suggested_depth: int | None = None

    @property
    def count(self):
        return len(self.branch_points)


def _parallel_pairs(graph):
    out = []
    edges = graph.edges
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            if (edges[i].source == edges[j].source
                    and edges[i].range == edges[j].range):
                out.append((edges[i], edges[j]))
    return out


def _suggest_depth(spec, tol):
    """Smallest depth whose certificate out-resolves tol/4."""
    c = spec.contraction_upper
    target = tol / 4.0
    scale = spec.max_diameter * (1 + math.sqrt(spec.dimension) / 8)
    if target >= scale:
        return 1
    return max(1, math.ceil(math.log(target / scale) / math.log(c)))


@dataclass
class _PairScan:
    edge_e: str
    edge_f: str
    sampled_min: float
    detections: list      # (x_coords, y_coords, certified)
    certified_zero: bool


def _scan_pair(spec, approx, e, f, tol):
    me, mf = spec.edge_maps[e.id], spec.edge_maps[f.id]
    cloud = approx.cloud(e.range)
    pts = cloud.points
    diff_matrix = me.matrix - mf.matrix
    diff_shift = mf.translation - me.translation
    gaps = np.linalg.norm(pts @ diff_matrix.T - diff_shift, axis=1)
    sampled_min = float(gaps.min())

    detections = []
    for idx in np.nonzero(gaps <= tol)[0]:
        y = pts[idx]
        detections.append((me.apply(y), y, False))

    certified_zero = False
    u, sigma, vt = np.linalg.svd(diff_matrix)
    scale = max(1.0, float(sigma.max(initial=0.0)))
    rank = int(np.sum(sigma > _RANK_CUTOFF * scale))
    d = spec.dimension
    membership_slack = approx.error_bound + tol
    if rank == d:
        y_star = np.linalg.solve(diff_matrix, diff_shift)
        if cloud.distance_to(y_star) <= membership_slack:
            detections.insert(0, (me.apply(y_star), y_star, True))
            certified_zero = True
    else:
        # rank-deficient: either no solution at all, or an affine subspace
        y0, residual, *_ = np.linalg.lstsq(diff_matrix, diff_shift, rcond=None)
        consistent = np.linalg.norm(diff_matrix @ y0 - diff_shift) <= \
            1e-9 * max(1.0, np.linalg.norm(diff_shift))
        if consistent:
            null_basis = vt[rank:].T  # orthonormal columns spanning the kernel
            rel = pts - y0
            projected = y0 + (rel @ null_basis) @ null_basis.T
            dist = np.linalg.norm(pts - projected, axis=1)
            close = np.nonzero(dist <= membership_slack)[0]
            if close.size:
                certified_zero = True
            for idx in close:
                q = projected[idx]
                detections.append((me.apply(q), q, True))
    return _PairScan(e.id, f.id, sampled_min, detections, certified_zero)


def _cluster(detections, tol, source_vertex, range_vertex):
    """Greedy clustering of detections within tol; edge sets merge."""
    clusters = []  # [x, y, set(edges), certified]
    for x, y, certified, pair_edges in detections:
        placed = False
        for entry in clusters:
            if (np.linalg.norm(entry[0] - x) <= tol
                    and np.linalg.norm(entry[1] - y) <= tol):
                entry[2].update(pair_edges)
                if certified and not entry[3]:
                    entry[0], entry[1], entry[3] = x, y, True
                placed = True
                break
        if not placed:
            clusters.append([x.copy(), y.copy(), set(pair_edges), certified])
    out = []
    for x, y, edges, certified in clusters:
        ordered = tuple(sorted(edges))
        out.append(BranchPoint(
            x=LabeledPoint(vertex=source_vertex, coords=tuple(float(c) for c in x)),
            y=LabeledPoint(vertex=range_vertex, coords=tuple(float(c) for c in y)),
            edges=ordered,
            index=len(ordered),
            certified=certified))
    return out


def branch_points(spec, approx, tol):
    """Detect branch points over the sampled clouds, with exact affine witnesses.

    The reported minimum cograph gap is exact zero whenever some pair has a
    certified coincidence inside the invariant set; otherwise it is the
    sampled minimum (a resolution-limited estimate).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pairs = _parallel_pairs(spec.graph)
    sufficient = approx.error_bound < tol / 4.0
    suggested = None if sufficient else _suggest_depth(spec, tol)
    if not pairs:
        return BranchReport(
            branch_points=[], min_cograph_gap=math.inf, tol=tol,
            sample_depth=approx.depth, has_parallel_pairs=False,
            sampled_min_gap=math.inf, scan_resolution_sufficient=sufficient,
            suggested_depth=suggested)

    sampled_min = math.inf
    true_min = math.inf
    points = []
    by_signature = {}
    for e, f in pairs:
        scan = _scan_pair(spec, approx, e, f, tol)
        sampled_min = min(sampled_min, scan.sampled_min)
        true_min = min(true_min,
                       0.0 if scan.certified_zero else scan.sampled_min)
        sig = (e.source, e.range)
        bucket = by_signature.setdefault(sig, [])
        for x, y, certified in scan.detections:
            bucket.append((x, y, certified, (e.id, f.id)))

    for (source, rng), detections in sorted(by_signature.items()):
        detections.sort(key=lambda item: (not item[2],
                                          tuple(item[0]), tuple(item[1])))
        points.extend(_cluster(detections, tol, source, rng))

    points.sort(key=lambda bp: (bp.edges, bp.x.coords))
    return BranchReport(
        branch_points=points, min_cograph_gap=true_min, tol=tol,
        sample_depth=approx.depth, has_parallel_pairs=True,
        sampled_min_gap=sampled_min, scan_resolution_sufficient=sufficient,
        suggested_depth=suggested)


def branch_index(spec, x, y, tol):
    """#{edges e : source(e) = vertex(x), range(e) = vertex(y), phi_e(y) = x}
    with the coincidence tested at tolerance tol."""
    ya = y.array()
    xa = x.array()
    count = 0
    for e in spec.graph.edges:
        if e.source != x.vertex or e.range != y.vertex:
            continue
        if np.linalg.norm(spec.edge_maps[e.id].apply(ya) - xa) <= tol:
            count += 1
    return count


@dataclass
class SeparationResult:
    holds: bool
    min_gap: float
    witness: tuple | None
    note: str
    report: BranchReport = field(repr=False, default=None)


def graph_separation(spec, approx, tol):
    """Pairwise disjointness of all cographs, decided from the branch report.

    When it holds, the correspondence algebra is isomorphic to the graph
    algebra of the underlying graph.
    """
    report = branch_points(spec, approx, tol)
    holds = not report.branch_points and report.min_cograph_gap > tol
    witness = None
    if report.branch_points:
        bp = report.branch_points[0]
        witness = (bp.edges[0], bp.edges[1], bp.y)
    note = ("separation holds: the associated algebra is isomorphic to the "
            "C*-algebra of the underlying graph"
            if holds else
            "separation fails: distinct cographs intersect")
    return SeparationResult(holds=holds, min_gap=report.min_cograph_gap,
                            witness=witness, note=note, report=report)


@dataclass
class OscResult:
    holds: bool | None
    failures: tuple

    @property
    def known(self):
        return self.holds is not None


def _candidate_pieces(spec, vertex):
    pieces = spec.open_sets[vertex]
    box = spec.seed_boxes[vertex]
    tol = 1e-9 * max(1.0, box.diameter)
    for piece in pieces:
        if spec.dimension == 1:
            if not isinstance(piece, Interval):
                raise SpecValidationError(
                    f"open-set piece at {vertex!r} must be an interval")
            inside = box.lo[0] - tol <= piece.lo and piece.hi <= box.hi[0] + tol
        else:
            if not isinstance(piece, ConvexPolygon):
                raise SpecValidationError(
                    f"open-set piece at {vertex!r} must be a convex polygon")
            inside = box.contains(piece.vertices, tol=tol)
        if not inside:
            raise SpecValidationError(
                f"open-set piece at {vertex!r} leaves the seed box")
    return pieces


def open_set_condition(spec, tol=1e-9):
    """Verify a user-supplied open-set candidate family.

    Returns holds=None when the system carries no candidate. Otherwise checks
    that every edge image of the candidate at range(e) nests into the
    candidate at source(e), and that images of distinct edges with a common
    source have disjoint interiors.
    """
    if spec.open_sets is None:
        return OscResult(holds=None, failures=())
    for v in spec.graph.vertices:
        if v not in spec.open_sets or not spec.open_sets[v]:
            raise SpecValidationError(f"missing open-set candidate at {v!r}")
    failures = []
    one_d = spec.dimension == 1
    images = {}
    for e in spec.graph.edges:
        m = spec.edge_maps[e.id]
        images[e.id] = [p.transform(m) for p in _candidate_pieces(spec, e.range)]
    for v in spec.graph.vertices:
        target = _candidate_pieces(spec, v)
        out = spec.graph.out_edges(v)
        for e in out:
            for k, piece in enumerate(images[e.id]):
                ok = (interval_in_union(piece, target, tol) if one_d
                      else polygon_in_union(piece, target, tol))
                if not ok:
                    failures.append(
                        f"containment: image of edge {e.id} (piece {k}) is not "
                        f"inside the candidate at {v}")
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                for a, pa in enumerate(images[out[i].id]):
                    for b, pb in enumerate(images[out[j].id]):
                        ok = (intervals_disjoint(pa, pb, tol) if one_d
                              else polygons_disjoint(pa, pb, tol))
                        if not ok:
                            failures.append(
                                f"overlap: images of edges {out[i].id} and "
                                f"{out[j].id} intersect at {v}")
    return OscResult(holds=not failures, failures=tuple(failures))


class Verdict(str, Enum):
    SIMPLE_PURELY_INFINITE = "SimplePurelyInfinite"
    HYPOTHESES_NOT_MET = "HypothesesNotMet"
    UNKNOWN = "Unknown"


@dataclass
class HypothesisReport:
    no_sinks_sources: bool
    irreducible: bool
    not_cyclic_permutation: bool
    open_set_condition: bool | None
    verdict: Verdict
    details: dict


def simplicity_report(spec, approx, tol):
    """Bundle the hypotheses under which the associated algebra is simple and
    purely infinite, together with the branch-point summary."""
    sinks = has_sinks_or_sources(spec.graph)
    irreducible = is_irreducible(spec.graph)
    # definitional form of "not a cyclic permutation": some out-degree >= 2
    not_cyclic = any(len(spec.graph.out_edges(v)) >= 2
                     for v in spec.graph.vertices)
    osc = open_set_condition(spec, tol=tol)
    branches = branch_points(spec, approx, tol)

    checks = [sinks.clean, irreducible, not_cyclic]
    if all(checks) and osc.holds is True:
        verdict = Verdict.SIMPLE_PURELY_INFINITE
    elif all(checks) and osc.holds is None:
        verdict = Verdict.UNKNOWN
    else:
        verdict = Verdict.HYPOTHESES_NOT_MET

    details = {
        "sinks": list(sinks.sinks),
        "sources": list(sinks.sources),
        "osc_failures": list(osc.failures),
        "branch_count": branches.count,
        "quotient_dimension": branches.count,
        "left_action_by_compacts": branches.count == 0,
        "min_cograph_gap": branches.min_cograph_gap,
        "branch_report": branches,
    }
    return HypothesisReport(
        no_sinks_sources=sinks.clean,
        irreducible=irreducible,
        not_cyclic_permutation=not_cyclic,
        open_set_condition=osc.holds,
        verdict=verdict,
        details=details)
