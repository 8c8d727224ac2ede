"""Coset graphs for a generating pair (K, S).

Vertices are cosets gK, canonically labelled by the sort-minimal coset
representative.  For each vertex and each s in S there is one oriented
edge from gK to (canonical rep of gK) . s . K; the reverse orientations are
matched up pairwise.  That bookkeeping is only consistent when S is closed
under conjugation by K, so GeneratingPair saturates S under inverses and
K-conjugation at construction (a no-op when K is trivial).  Saturation does
not change the generated subgroup, and coset graphs for the original and
saturated pair are quasi-isometric, so everything the lab measures agrees.

Parallel edges (distinct s with the same target coset) are kept, so every
interior vertex has exactly |S| outgoing edges.
"""

from __future__ import annotations

from .errors import BudgetExceeded, GenerationError
from .group_backends import DEFAULT_CAP
from .serre_graphs import SerreGraph


class Subgroup:
    """Finite subgroup of a backend group, given by its element list."""

    def __init__(self, backend, elements, name="K", check=True):
        self.backend = backend
        self.elements = tuple(sorted(set(elements), key=backend.sort_key))
        self.name = name
        if check:
            self._validate()

    def _validate(self):
        elems = set(self.elements)
        if self.backend.identity() not in elems:
            raise ValueError("subgroup must contain the identity")
        for a in self.elements:
            if self.backend.inverse(a) not in elems:
                raise ValueError("subgroup not closed under inverse")
            for b in self.elements:
                if self.backend.multiply(a, b) not in elems:
                    raise ValueError("subgroup not closed under multiplication")

    def is_trivial(self):
        return len(self.elements) == 1

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in set(self.elements)

    def __repr__(self):
        return f"Subgroup({self.name}, order {len(self.elements)})"


def trivial_subgroup(backend):
    return Subgroup(backend, [backend.identity()], name="1", check=False)


def coset_canonical(backend, K, g):
    """Sort-minimal representative of gK; equal labels iff equal cosets.

    Multiplying by the subgroup elements also normalizes g, so raw input
    words are fine.
    """
    return min((backend.multiply(g, k) for k in K.elements), key=backend.sort_key)


class GeneratingPair:
    """A pair (K, S): finite subgroup plus finite symmetric generator list.

    S is deduplicated, closed under inverses and under conjugation by K,
    and sorted canonically.  Elements of K (in particular the identity)
    are rejected.
    """

    def __init__(self, backend, K, S, name=None):
        self.backend = backend
        self.K = K
        base = coset_canonical(backend, K, backend.identity())
        work = list(S)
        closed = set()
        while work:
            s = work.pop()
            if s in closed:
                continue
            if coset_canonical(backend, K, s) == base:
                raise ValueError(f"generator {s!r} lies in K")
            closed.add(s)
            work.append(backend.inverse(s))
            for k in K.elements:
                work.append(backend.multiply(backend.multiply(k, s), backend.inverse(k)))
        if not closed:
            raise ValueError("empty generating set")
        self.S = tuple(sorted(closed, key=backend.sort_key))
        self.s_inverse_index = tuple(self.S.index(backend.inverse(s)) for s in self.S)
        self.name = name or f"({K.name}; {len(self.S)} gens)"

    def __repr__(self):
        return f"GeneratingPair({self.name})"


class RoughCayleyTruncation:
    """Radius-R ball of the coset graph of a generating pair."""

    def __init__(self, pair, graph, base, radius, sphere, reps, edge_gen, exhausted):
        self.pair = pair
        self.graph = graph
        self.base = base
        self.radius = radius
        self.sphere = sphere
        self.reps = reps
        self.edge_gen = edge_gen
        self.exhausted = exhausted

    def ball(self, r):
        """Labels at distance <= r from the base coset."""
        return [v for v in self.graph.vertices if self.sphere[v] <= r]

    def sphere_labels(self, r):
        return [v for v in self.graph.vertices if self.sphere[v] == r]

    def act(self, k, label):
        """Left action on coset labels; defined for any group element."""
        backend = self.pair.backend
        return coset_canonical(backend, self.pair.K, backend.multiply(k, self.reps[label]))

    def to_dot(self):
        palette = ["white", "lightblue", "lightyellow", "lightpink", "lightgreen", "lavender"]
        colors = {v: palette[self.sphere[v] % len(palette)] for v in self.graph.vertices}
        return self.graph.to_dot(name="cosets", vertex_color=colors)

    def to_json(self):
        return {
            "pair": self.pair.name,
            "radius": self.radius,
            "exhausted": self.exhausted,
            "cosets": [
                {"label": str(v), "sphere": self.sphere[v]} for v in self.graph.vertices
            ],
            "edges": self.graph.to_json()["edges"],
        }


def build(pair, radius, cap=DEFAULT_CAP, expect_infinite=False):
    """BFS the coset graph out to the given radius.

    Raises BudgetExceeded past the element cap and GenerationError when
    expect_infinite is set but the graph is exhausted early (the symptom
    of S failing to generate enough of the group).
    """
    if radius < 1:
        raise ValueError("radius must be at least 1")
    backend = pair.backend
    base = coset_canonical(backend, pair.K, backend.identity())
    reps = {base: base}
    sphere = {base: 0}
    order = [base]
    frontier = [base]
    exhausted = False
    for d in range(1, radius + 1):
        found = {}
        for x in frontier:
            for s in pair.S:
                y = coset_canonical(backend, pair.K, backend.multiply(reps[x], s))
                if y in sphere or y in found:
                    continue
                found[y] = y
        layer = sorted(found, key=backend.sort_key)
        for y in layer:
            sphere[y] = d
            reps[y] = y
            order.append(y)
            if len(order) > cap:
                raise BudgetExceeded(f"coset enumeration exceeded cap {cap} at radius {d}")
        frontier = layer
        if not frontier:
            exhausted = True
            break
    if exhausted and expect_infinite:
        raise GenerationError(
            f"{pair.name}: enumeration exhausted after {len(order)} cosets; S does not generate an infinite family"
        )
    index = {v: i for i, v in enumerate(order)}
    # one half-edge per (coset, s); targets outside the ball are dropped
    half = {}
    for x in order:
        for si, s in enumerate(pair.S):
            y = coset_canonical(backend, pair.K, backend.multiply(reps[x], s))
            if y not in sphere:
                continue
            key = (min(index[x], index[y]), max(index[x], index[y]))
            fwd, bwd = half.setdefault(key, ([], []))
            (fwd if index[x] < index[y] else bwd).append((x, si, y))
    origin, inverse, edge_gen = {}, {}, {}
    count = 0
    for key in sorted(half):
        fwd, bwd = half[key]
        if len(fwd) != len(bwd):
            raise RuntimeError(
                "unbalanced edge multiplicities; generating set is not closed under K-conjugation"
            )
        for (x, si, y), (y2, sj, x2) in zip(fwd, bwd):
            e, f = 2 * count, 2 * count + 1
            count += 1
            origin[e], origin[f] = x, y
            inverse[e], inverse[f] = f, e
            edge_gen[e], edge_gen[f] = si, sj
    graph = SerreGraph(order, origin, inverse, check=False)
    t = RoughCayleyTruncation(pair, graph, base, radius, sphere, reps, edge_gen, exhausted)
    for v in order:
        if sphere[v] < radius and len(graph.star(v)) != len(pair.S):
            raise RuntimeError(f"interior vertex {v!r} has a partial star")
    return t
