"""Pointwise evaluation of the bimodule structure living on the cographs.

Functions on the union of cographs are represented by evaluators
(x, y, edge) -> complex; functions on the invariant set by evaluators
point -> complex. The edge argument resolves points shared by several
cographs, so the representation strictly covers functions on the disjoint
union; genuinely cograph-borne functions must be edge-independent there.

Membership "y lies in the component K_{r(e)}" is decided purely by the vertex
label of y, never by coordinate comparisons.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import LabeledPoint
from .graph import paths_from

__all__ = [
    "CographFunction",
    "SampledObservable",
    "xi_zero",
    "inner_product",
    "expectation",
    "norm_two",
    "norm_inf",
    "tensor_eval",
    "is_invariant",
    "sample_points",
]


@dataclass
class CographFunction:
    """Element of the correspondence, evaluated at (x, y) on the cograph of an edge."""

    evaluator: Callable
    description: str = ""

    def __call__(self, x, y, edge_id):
        return complex(self.evaluator(x, y, edge_id))


@dataclass
class SampledObservable:
    """Continuous-function stand-in on the invariant set."""

    evaluator: Callable
    description: str = ""

    def __call__(self, x):
        return complex(self.evaluator(x))


def _incoming(spec, vertex):
    """Edges e with range(e) = vertex; exactly those with y in K_{r(e)}."""
    return spec.graph.in_edges(vertex)


def _map_point(spec, edge, y):
    image = spec.edge_maps[edge.id].apply(y.array())
    return LabeledPoint(vertex=edge.source, coords=tuple(float(c) for c in image))


def xi_zero(spec):
    """The canonical unit vector: 1/sqrt(#incoming edges at the vertex of y)."""
    counts = {v: len(_incoming(spec, v)) for v in spec.graph.vertices}

    def evaluate(x, y, edge_id):
        return 1.0 / math.sqrt(counts[y.vertex])

    return CographFunction(evaluate, description="canonical unit vector")


def inner_product(spec, xi, eta, y, approx=None):
    """Module inner product at y: sum over incoming edges of
    conj(xi(phi_e(y), y)) * eta(phi_e(y), y)."""
    if approx is not None:
        cloud = approx.cloud(y.vertex)
        if cloud.distance_to(y.array()) > approx.error_bound + 1e-12:
            raise ValueError(
                f"sample point {y.coords} is not within resolution of the "
                f"cloud at {y.vertex!r}")
    total = 0j
    for e in _incoming(spec, y.vertex):
        x = _map_point(spec, e, y)
        total += xi(x, y, e.id).conjugate() * eta(x, y, e.id)
    return total


def expectation(spec, a, y):
    """Average of the observable over the incoming-edge images of y."""
    edges = _incoming(spec, y.vertex)
    return sum(a(_map_point(spec, e, y)) for e in edges) / len(edges)


def sample_points(approx):
    """All cloud points as labeled points, in deterministic order."""
    out = []
    for v in sorted(approx.clouds):
        for row in approx.clouds[v].points:
            out.append(LabeledPoint(vertex=v, coords=tuple(float(c) for c in row)))
    return out


def norm_two(spec, approx, xi):
    """Sampled module two-norm: sup_y sqrt(<xi, xi>(y)) over the clouds.

    A lower bound for the true supremum; the gap is controlled by the modulus
    of continuity of xi, which is not estimated here.
    """
    best = 0.0
    for y in sample_points(approx):
        value = inner_product(spec, xi, xi, y).real
        best = max(best, math.sqrt(max(value, 0.0)))
    return best


def norm_inf(spec, approx, xi):
    """Sampled sup norm of xi over the cograph points above the clouds."""
    best = 0.0
    for y in sample_points(approx):
        for e in _incoming(spec, y.vertex):
            best = max(best, abs(xi(_map_point(spec, e, y), y, e.id)))
    return best


def tensor_eval(spec, xis, path, y):
    """Evaluate an elementary tensor along a path at a base point y.

    With intermediate points z_k = phi_{w_k ... w_n}(y) and z_{n+1} = y this
    is the product of xi_k(z_k, z_{k+1}) over the steps, evaluated left to
    right.
    """
    path = spec.graph.make_path(path.edges if hasattr(path, "edges") else path)
    if len(xis) != path.length:
        raise ValueError(
            f"need one factor per edge: {len(xis)} factors, {path.length} edges")
    y = np.asarray(y, dtype=float)
    edges = [spec.graph.edge(eid) for eid in path.edges]
    points = [LabeledPoint(vertex=edges[-1].range, coords=tuple(float(c) for c in y))]
    for e in reversed(edges):
        points.append(_map_point(spec, e, points[-1]))
    points.reverse()  # points[k] = phi_{w_{k+1} ... w_n}(y), points[0] outermost
    product = complex(1.0)
    for k, (xi, e) in enumerate(zip(xis, edges)):
        product *= xi(points[k], points[k + 1], e.id)
    return product


def is_invariant(spec, a, n, approx, tol):
    """Check n-step invariance of an observable on the sampled clouds.

    For every sampled y and all length-n paths alpha, beta ending at the
    vertex of y and starting at a common vertex, the values a(phi_alpha(y))
    and a(phi_beta(y)) must agree within tol.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    paths_into = {v: [] for v in spec.graph.vertices}
    for v in spec.graph.vertices:
        for p in paths_from(spec.graph, v, n):
            paths_into[p.range].append(p)
    for y in sample_points(approx):
        by_source = {}
        for p in paths_into[y.vertex]:
            image = y
            for eid in reversed(p.edges):
                image = _map_point(spec, spec.graph.edge(eid), image)
            by_source.setdefault(p.source, []).append(a(image))
        for values in by_source.values():
            lo = min(values, key=lambda z: (z.real, z.imag))
            for z in values:
                if abs(z - lo) > tol:
                    return False
    return True
