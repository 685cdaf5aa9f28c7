"""Stranded-graph data model: validation, faces, and the 1/N degree.

A stranded graph on V vertices with q strands per disorder line is stored
as two involutions:

* ``alpha`` -- fixed-point-free involution on the q*V slots, one slot per
  (vertex, position) pair; it encodes the fermionic lines.
* ``mu`` -- fixed-point-free involution on the vertices; it encodes the
  disorder lines.

Slots are indexed densely: slot ``s`` is position ``s % q`` of vertex
``s // q``.  Strands are kept in identity normal form, so the strand at
position m of a disorder line always connects slot (v, m) to slot
(mu(v), m) and needs no explicit storage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence


class InvalidGraphError(ValueError):
    """Raised when pairing data does not define a valid stranded graph."""


class Slot(NamedTuple):
    vertex: int
    position: int


def slot_index(q: int, vertex: int, position: int) -> int:
    return vertex * q + position


def slot_of(q: int, s: int) -> Slot:
    return Slot(s // q, s % q)


@dataclass(frozen=True)
class StrandedGraph:
    """Immutable stranded graph; construct through :func:`build_graph`."""

    q: int
    v: int
    alpha: tuple  # slot -> slot, fermionic involution
    mu: tuple     # vertex -> vertex, disorder involution

    @property
    def n_slots(self) -> int:
        return self.q * self.v

    def strand_partner(self, s: int) -> int:
        """Other end of the strand through slot s (same position, disorder partner)."""
        return self.mu[s // self.q] * self.q + s % self.q

    def fermionic_lines(self):
        """Fermionic lines as slot pairs (s, t) with s < t, sorted."""
        return [(s, t) for s, t in enumerate(self.alpha) if s < t]

    def disorder_lines(self):
        return [(v, w) for v, w in enumerate(self.mu) if v < w]

    def relabeled(self, perm: Sequence[int]) -> "StrandedGraph":
        """Apply the vertex permutation v -> perm[v]; slots follow positions."""
        q = self.q
        alpha = [0] * self.n_slots
        mu = [0] * self.v
        for v in range(self.v):
            mu[perm[v]] = perm[self.mu[v]]
            for m in range(q):
                t = self.alpha[v * q + m]
                alpha[perm[v] * q + m] = perm[t // q] * q + t % q
        return StrandedGraph(q, self.v, tuple(alpha), tuple(mu))


@dataclass(frozen=True)
class UnderlyingGraph:
    """Vertex-level multigraph left after deleting strands."""

    v: int
    edges: tuple  # sorted vertex pairs, multiset

    def degree_sequence(self):
        deg = [0] * self.v
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg


@dataclass(frozen=True)
class FaceSet:
    """Orbits of the directed-crossing successor map.

    Each directed crossing is identified by its starting slot s and runs
    (v, m) -> (mu(v), m).  Every face is traversed once per direction, so
    the face count is half the orbit count.
    """

    orbits: tuple  # tuple of tuples of slots

    @property
    def F(self) -> int:
        return len(self.orbits) // 2


@dataclass(frozen=True)
class DegreeReport:
    F: int
    V: int
    q: int
    delta: int

    @property
    def weight_exponent(self) -> int:
        return self.delta


# ---------------------------------------------------------------------------
# raw helpers (flat-sequence arguments, shared with the enumerator hot path)
# ---------------------------------------------------------------------------

def _check_involution(perm: Sequence[int], n: int, what: str) -> None:
    if len(perm) != n:
        raise InvalidGraphError(f"{what} must cover all {n} elements, got {len(perm)}")
    for i, j in enumerate(perm):
        if not 0 <= j < n:
            raise InvalidGraphError(f"{what}: index {j} out of range")
        if j == i:
            raise InvalidGraphError(f"{what}: fixed point at {i}")
        if perm[j] != i:
            raise InvalidGraphError(f"{what}: not an involution at {i}")


def _face_orbits(q: int, v: int, alpha: Sequence[int], mu: Sequence[int]):
    """Orbits of s -> alpha[strand_partner(s)] as lists of starting slots."""
    n = q * v
    seen = [False] * n
    orbits = []
    for s0 in range(n):
        if seen[s0]:
            continue
        orbit = []
        s = s0
        while not seen[s]:
            seen[s] = True
            orbit.append(s)
            s = alpha[mu[s // q] * q + s % q]
        orbits.append(tuple(orbit))
    return orbits


def _face_count(q: int, v: int, alpha: Sequence[int], mu: Sequence[int]) -> int:
    n = q * v
    seen = [False] * n
    orbits = 0
    for s0 in range(n):
        if seen[s0]:
            continue
        orbits += 1
        s = s0
        while not seen[s]:
            seen[s] = True
            s = alpha[mu[s // q] * q + s % q]
    return orbits // 2


def _g0_connected(q: int, v: int, alpha: Sequence[int]) -> bool:
    reached = [False] * v
    reached[0] = True
    stack = [0]
    count = 1
    while stack:
        w = stack.pop()
        base = w * q
        for m in range(q):
            u = alpha[base + m] // q
            if not reached[u]:
                reached[u] = True
                count += 1
                stack.append(u)
    return count == v


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def build_graph(q: int, v: int, fermionic, disorder) -> StrandedGraph:
    """Validate pairings and build a stranded graph.

    ``fermionic`` is an iterable of slot pairs, each slot given as
    (vertex, position); ``disorder`` is an iterable of vertex pairs.
    Rejects q < 2, odd V, fixed points and double coverage.  Connectivity
    of the underlying graph is *not* required here; use
    :func:`is_connected_g0` to test full membership in the graph family.
    """
    if q < 2:
        raise InvalidGraphError(f"q must be >= 2, got {q}")
    if v < 2 or v % 2:
        raise InvalidGraphError(f"V must be even and >= 2, got {v}")
    n = q * v
    alpha = [-1] * n
    for pair in fermionic:
        (a, am), (b, bm) = pair
        try:
            s = slot_index(q, a, am)
            t = slot_index(q, b, bm)
        except TypeError as exc:
            raise InvalidGraphError(f"malformed slot pair {pair!r}") from exc
        if not (0 <= a < v and 0 <= am < q and 0 <= b < v and 0 <= bm < q):
            raise InvalidGraphError(f"slot pair {pair!r} out of range")
        if s == t:
            raise InvalidGraphError(f"slot ({a},{am}) paired with itself")
        if alpha[s] != -1 or alpha[t] != -1:
            raise InvalidGraphError(f"slot covered twice in pair {pair!r}")
        alpha[s] = t
        alpha[t] = s
    if -1 in alpha:
        missing = slot_of(q, alpha.index(-1))
        raise InvalidGraphError(f"slot {missing} not covered by the fermionic pairing")
    mu = [-1] * v
    for a, b in disorder:
        if not (0 <= a < v and 0 <= b < v):
            raise InvalidGraphError(f"disorder pair ({a},{b}) out of range")
        if a == b:
            raise InvalidGraphError(f"vertex {a} disorder-paired with itself")
        if mu[a] != -1 or mu[b] != -1:
            raise InvalidGraphError(f"vertex covered twice in disorder pair ({a},{b})")
        mu[a] = b
        mu[b] = a
    if -1 in mu:
        raise InvalidGraphError(f"vertex {mu.index(-1)} not covered by the disorder pairing")
    return StrandedGraph(q, v, tuple(alpha), tuple(mu))


def from_involutions(q: int, v: int, alpha, mu, validate: bool = True) -> StrandedGraph:
    """Build a graph directly from flat involutions on slots and vertices."""
    alpha = tuple(alpha)
    mu = tuple(mu)
    if validate:
        if q < 2:
            raise InvalidGraphError(f"q must be >= 2, got {q}")
        if v < 2 or v % 2:
            raise InvalidGraphError(f"V must be even and >= 2, got {v}")
        _check_involution(alpha, q * v, "fermionic pairing")
        _check_involution(mu, v, "disorder pairing")
    return StrandedGraph(q, v, alpha, mu)


def g_min(q: int) -> StrandedGraph:
    """The two-vertex graph with fermionic lines parallel to the strands."""
    if q < 2:
        raise InvalidGraphError(f"q must be >= 2, got {q}")
    alpha = tuple(list(range(q, 2 * q)) + list(range(q)))
    return StrandedGraph(q, 2, alpha, (1, 0))


def underlying_g0(graph: StrandedGraph, include_disorder: bool = False) -> UnderlyingGraph:
    """Vertex-level multigraph of the fermionic lines (optionally plus disorder)."""
    q = graph.q
    edges = [tuple(sorted((s // q, t // q))) for s, t in graph.fermionic_lines()]
    if include_disorder:
        edges.extend(graph.disorder_lines())
    return UnderlyingGraph(graph.v, tuple(sorted(edges)))


def is_connected_g0(graph: StrandedGraph) -> bool:
    """True iff the fermionic-only underlying graph is connected."""
    return _g0_connected(graph.q, graph.v, graph.alpha)


def trace_faces(graph: StrandedGraph) -> FaceSet:
    """Faces as orbits of the directed-crossing successor map.

    From the crossing starting at slot (v, m), cross the strand to
    (mu(v), m), then follow the fermionic line to the next starting slot.
    """
    orbits = _face_orbits(graph.q, graph.v, graph.alpha, graph.mu)
    return FaceSet(tuple(orbits))


def face_line_sets(graph: StrandedGraph):
    """For each face orbit, the fermionic lines it crosses (as min-slot ids)."""
    q, alpha, mu = graph.q, graph.alpha, graph.mu
    out = []
    for orbit in _face_orbits(graph.q, graph.v, alpha, mu):
        lines = set()
        for s in orbit:
            t = mu[s // q] * q + s % q
            u = alpha[t]
            lines.add(t if t < u else u)
        out.append(frozenset(lines))
    return out


def degree(graph: StrandedGraph) -> DegreeReport:
    """Face count and the exponent of N in the graph weight."""
    F = _face_count(graph.q, graph.v, graph.alpha, graph.mu)
    delta = F - (graph.q - 1) * graph.v // 2
    return DegreeReport(F=F, V=graph.v, q=graph.q, delta=delta)
