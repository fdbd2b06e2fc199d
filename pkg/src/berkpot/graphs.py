"""Potential theory on finite metric graphs.

PL functions are affine on edges and determined by vertex values; the
Laplacian of such a function is the atomic measure whose weight at a vertex
is the sum of outgoing slopes.  The Dirichlet problem (harmonic extension of
boundary data) is a weighted-graph linear solve with weights 1/length.

Values and lengths may be exact ``Fraction``s (ultrametric fibers) or
floats (archimedean models); a single graph should not mix the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .points import MetricGraph
from .polys import exact_solve


class GraphError(ValueError):
    pass


@dataclass
class PLFunction:
    """Continuous, piecewise-affine function: one value per vertex."""

    graph: MetricGraph
    values: list

    def __post_init__(self):
        if len(self.values) != self.graph.n:
            raise GraphError("need one value per vertex")

    def slope(self, i: int, j: int, length) -> object:
        """Slope along the edge from i to j."""
        return (self.values[j] - self.values[i]) / length


@dataclass
class GraphMeasure:
    """Finite atomic measure supported on vertices."""

    atoms: list  # (vertex_index, weight)

    @property
    def total_mass(self):
        return sum(w for _, w in self.atoms)

    def weight_at(self, v: int):
        return sum(w for i, w in self.atoms if i == v)

    def restricted(self, vertices) -> "GraphMeasure":
        vs = set(vertices)
        return GraphMeasure([(i, w) for i, w in self.atoms if i in vs])


def vertex_laplacian_weight(u: PLFunction, v: int):
    adj = u.graph.adjacency()
    total = 0
    for w, ln, _ in adj[v]:
        total += u.slope(v, w, ln)
    return total


def graph_laplacian(u: PLFunction) -> GraphMeasure:
    """Atomic measure sum_x lambda_x(u) delta_x, lambda_x = sum of outgoing slopes.

    Total mass telescopes to zero on a compact graph.
    """
    atoms = []
    for v in range(u.graph.n):
        atoms.append((v, vertex_laplacian_weight(u, v)))
    return GraphMeasure(atoms)


def dirichlet_extend(graph: MetricGraph, boundary_values: dict) -> PLFunction:
    """Unique PL function matching boundary values and harmonic inside.

    Solves the weighted-graph system (weights 1/length); exact when lengths
    and boundary data are rational, dense float solve otherwise.  Values obey
    the maximum principle: they lie in [min boundary, max boundary].
    """
    if not boundary_values:
        raise GraphError("boundary must be nonempty")
    if not graph.is_connected():
        raise GraphError("graph must be connected")
    for b in boundary_values:
        if not (0 <= b < graph.n):
            raise GraphError(f"boundary vertex {b} out of range")
    interior = [v for v in range(graph.n) if v not in boundary_values]
    exact = all(isinstance(x, (Fraction, int)) for x in boundary_values.values()) and all(
        isinstance(ln, (Fraction, int)) for _, _, ln in graph.edges
    )
    idx = {v: k for k, v in enumerate(interior)}
    m = len(interior)
    zero = Fraction(0) if exact else 0.0
    a = [[zero] * m for _ in range(m)]
    rhs = [zero] * m
    adj = graph.adjacency()
    for v in interior:
        r = idx[v]
        for w, ln, _ in adj[v]:
            wgt = (Fraction(1) / Fraction(ln)) if exact else 1.0 / float(ln)
            a[r][r] += wgt
            if w in idx:
                a[r][idx[w]] -= wgt
            else:
                rhs[r] += wgt * boundary_values[w]
    if m:
        if exact:
            sol = exact_solve(a, rhs)
        else:
            import numpy as np

            sol = list(np.linalg.solve(np.array(a, dtype=float), np.array(rhs, dtype=float)))
    else:
        sol = []
    values = [None] * graph.n
    for v, x in boundary_values.items():
        values[v] = Fraction(x) if exact and isinstance(x, int) else x
    for v in interior:
        values[v] = sol[idx[v]]
    return PLFunction(graph, values)


def mass_in(u: PLFunction, region, ell) -> tuple:
    """Positive Laplacian mass in a vertex region and its slope bound.

    The bound is (N/ell) * (sup over the ell-enlarged region - inf over the
    region), where N counts branches leaving the region; valid when u is
    subharmonic on the region's interior and ell does not exceed any
    outgoing edge length.  Graph leaves inside the region count as interior:
    a PL function stands for its retraction pullback, which is constant on
    the ambient branches beyond a leaf, so the leaf's one-sided slope is its
    true ambient Laplacian weight.
    """
    region = set(region)
    adj = u.graph.adjacency()
    outgoing = []  # (boundary vertex, other endpoint, length)
    for v in region:
        for w, ln, _ in adj[v]:
            if w not in region:
                outgoing.append((v, w, ln))
    for v, w, ln in outgoing:
        if ell > ln:
            raise GraphError(f"ell={ell} exceeds outgoing edge length {ln} at vertex {v}")
    boundary_vertices = {v for v, _, _ in outgoing}
    interior = region - boundary_vertices
    mass = 0
    for v in interior:
        lam = vertex_laplacian_weight(u, v)
        if lam > 0:
            mass += lam
    sup_ell = max(u.values[v] for v in region) if region else 0
    for v, w, ln in outgoing:
        reach = u.values[v] + (u.values[w] - u.values[v]) * (ell / ln)
        if reach > sup_ell:
            sup_ell = reach
    inf_y = min(u.values[v] for v in region)
    n_out = len(outgoing)
    bound = (n_out / ell) * (sup_ell - inf_y) if n_out else 0 * ell
    return mass, bound


def measure_pairing(u: PLFunction, mu: GraphMeasure):
    """integral of u against an atomic graph measure."""
    return sum(w * u.values[v] for v, w in mu.atoms)


def subdivide_edge(graph: MetricGraph, edge_index: int, offset, label=None):
    """Insert a vertex inside an edge at the given distance from endpoint i.

    Returns (new_graph, new_vertex_index).  Vertex labels are carried over;
    the new vertex takes the supplied label (callers interpolate points).
    """
    i, j, ln = graph.edges[edge_index]
    if not (0 < offset < ln):
        raise GraphError(f"offset {offset} outside edge of length {ln}")
    labels = list(graph.labels) + [label]
    new_v = len(labels)
    new_v -= 1
    edges = [e for k, e in enumerate(graph.edges) if k != edge_index]
    edges.append((i, new_v, offset))
    edges.append((new_v, j, ln - offset))
    return MetricGraph(labels=labels, edges=edges, boundary=list(graph.boundary)), new_v


# -- (de)serialization --------------------------------------------------------

def graph_to_json(graph: MetricGraph) -> dict:
    from .points import point_to_json

    return {
        "vertices": [point_to_json(lbl) if lbl is not None else None for lbl in graph.labels],
        "edges": [[i, j, str(ln)] for i, j, ln in graph.edges],
        "boundary": list(graph.boundary),
    }


def graph_from_json(obj: dict) -> MetricGraph:
    from .points import point_from_json

    labels = [point_from_json(v) if v else None for v in obj["vertices"]]
    edges = []
    for i, j, ln in obj["edges"]:
        edges.append((int(i), int(j), Fraction(ln)))
    return MetricGraph(labels=labels, edges=edges, boundary=[int(b) for b in obj.get("boundary", [])])
