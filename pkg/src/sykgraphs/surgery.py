"""Cut-and-reglue surgeries: common-face pairs, 2-cut tests, and the
face-gaining witness that certifies a graph is not face-maximal."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import StrandedGraph, _face_count, _face_orbits
from .melons import melonic_insert


class SurgeryError(ValueError):
    """Raised when a surgery precondition is violated."""


class ContractionError(ValueError):
    """Raised when a join would pair a half-line with itself (degenerate
    self-strand configuration), or, for internal loop-free contraction
    candidates, when a fermionic chain closes into a vertex-free loop."""


class SurgeryInternalError(RuntimeError):
    """A reconnection outcome that the construction rules out; indicates a bug."""


@dataclass(frozen=True)
class CommonFacePair:
    """Two distinct fermionic lines (slot pairs, s < t) occurring on one face."""

    e1: tuple
    e2: tuple
    face: tuple  # the shared face orbit, as starting slots

    def to_dict(self) -> dict:
        return {"e1": list(self.e1), "e2": list(self.e2)}


@dataclass(frozen=True)
class CutReport:
    """Connectivity verdicts for removing a pair of fermionic lines.

    ``cut_in_g`` removes the pair from the graph with fermionic plus
    disorder edges (strands ignored); ``cut_in_g0`` from the fermionic-only
    underlying graph.  ``sides_g`` / ``sides_g0`` hold the vertex sets of the
    components when the respective removal disconnects."""

    e1: tuple
    e2: tuple
    cut_in_g: bool
    cut_in_g0: bool
    sides_g: Optional[tuple]
    sides_g0: Optional[tuple]


# ---------------------------------------------------------------------------
# raw helpers on flat involutions
# ---------------------------------------------------------------------------

def _components(q, v, alpha, mu, e1, e2, include_disorder):
    """Component label per vertex after deleting lines e1 and e2."""
    nbr = [0] * v
    for s in range(len(alpha)):
        t = alpha[s]
        if s < t and (s, t) != e1 and (s, t) != e2:
            nbr[s // q] |= 1 << (t // q)
            nbr[t // q] |= 1 << (s // q)
    if include_disorder:
        for w in range(v):
            u = mu[w]
            if w != u:
                nbr[w] |= 1 << u
    comp = [-1] * v
    count = 0
    for start in range(v):
        if comp[start] >= 0:
            continue
        reach = frontier = 1 << start
        while frontier:
            nxt = 0
            while frontier:
                low = frontier & -frontier
                nxt |= nbr[low.bit_length() - 1]
                frontier ^= low
            frontier = nxt & ~reach
            reach |= frontier
        for w in range(v):
            if reach >> w & 1:
                comp[w] = count
        count += 1
    return comp, count


def _sides(comp, count):
    if count < 2:
        return None
    groups = [[] for _ in range(count)]
    for w, c in enumerate(comp):
        groups[c].append(w)
    return tuple(frozenset(g) for g in groups)


def _reglued(alpha, e1, e2, orientation):
    x1, y1 = e1
    x2, y2 = e2
    out = list(alpha)
    joins = ((x1, x2), (y1, y2)) if orientation == 0 else ((x1, y2), (y1, x2))
    for s, t in joins:
        out[s] = t
        out[t] = s
    return out


def _contract_raw(q, v, alpha, mu, v_left, allow_loops=False):
    """Contract the disorder line at v_left; returns (alpha', mu', loops).

    Joins, for each strand position, the fermionic partners of the two
    removed endpoint slots, chasing chains through lines internal to the
    removed pair.  A chain with no external end is a vertex-free closed
    loop; it carries exactly one face and raises ContractionError unless
    ``allow_loops`` is set, in which case the loops are discarded and
    counted.
    """
    v_right = mu[v_left]
    if v_right == v_left:
        raise SurgeryError(f"vertex {v_left} has no distinct disorder partner")
    if v < 4:
        raise SurgeryError("cannot contract the only disorder line")
    a, b = v_left, v_right

    def link(s):
        w, m = s // q, s % q
        return (b if w == a else a) * q + m

    removed_seen = set()
    joins = []
    for m in range(q):
        for entry in (a * q + m, b * q + m):
            if entry in removed_seen:
                continue
            x = alpha[entry]
            if x // q in (a, b):
                continue  # chain interior; reached from an external end if any
            # walk from the external slot x back through the removed pair
            cur = entry
            removed_seen.add(cur)
            while True:
                cur = link(cur)
                removed_seen.add(cur)
                nxt = alpha[cur]
                if nxt // q in (a, b):
                    cur = nxt
                    removed_seen.add(cur)
                else:
                    if nxt == x:
                        raise ContractionError(
                            "join would pair a half-line with itself"
                        )
                    joins.append((x, nxt))
                    break
    loops = 0
    if len(removed_seen) != 2 * q:
        if not allow_loops:
            raise ContractionError(
                "contraction closes a fermionic chain with no external legs"
            )
        leftovers = {
            s
            for w in (a, b)
            for s in range(w * q, w * q + q)
            if s not in removed_seen
        }
        while leftovers:
            loops += 1
            s = start = leftovers.pop()
            while True:
                s = alpha[link(s)]
                if s == start:
                    break
                leftovers.discard(s)
        # the walk sees each closed loop twice (once per direction); each
        # geometric loop carries exactly one face
        loops //= 2
    vmap = [w - (w > a) - (w > b) for w in range(v)]

    def smap(s):
        return vmap[s // q] * q + s % q

    new_alpha = [0] * (q * (v - 2))
    for s, t in enumerate(alpha):
        if s // q in (a, b) or t // q in (a, b):
            continue
        new_alpha[smap(s)] = smap(t)
    for x, y in joins:
        new_alpha[smap(x)] = smap(y)
        new_alpha[smap(y)] = smap(x)
    new_mu = [0] * (v - 2)
    for w, u in enumerate(mu):
        if w != a and w != b:
            new_mu[vmap[w]] = vmap[u]
    return new_alpha, new_mu, loops


def _first_insert_raw(q, v, alpha, mu):
    """Melonic insertion on the first fermionic line at position 0."""
    for s, t in enumerate(alpha):
        if s < t:
            line = (s, t)
            break
    a, b = v, v + 1
    out = list(alpha) + [0] * (2 * q)
    for m in range(1, q):
        out[a * q + m] = b * q + m
        out[b * q + m] = a * q + m
    x, y = line
    out[x] = a * q
    out[a * q] = x
    out[b * q] = y
    out[y] = b * q
    return out, list(mu) + [b, a]


def _case2_search(q, v, alpha, mu, allow_loops, comp=None, count=None):
    """Depth-first search over bridging-contraction choices until the
    fermionic-only graph is connected.  Returns (v', alpha', mu', steps) with
    steps = [(v, alpha, mu, loops), ...] after each contraction, or None."""
    if comp is None:
        comp, count = _components(q, v, alpha, mu, None, None, False)
    if count == 1:
        return v, alpha, mu, []
    if v < 4:
        return None
    for w in range(v):
        u = mu[w]
        if w < u and comp[w] != comp[u]:
            try:
                a2, m2, loops = _contract_raw(q, v, alpha, mu, w, allow_loops)
            except ContractionError:
                continue
            sub = _case2_search(q, v - 2, a2, m2, allow_loops)
            if sub is not None:
                rv, ra, rm, steps = sub
                return rv, ra, rm, [(v - 2, a2, m2, loops)] + steps
    return None


def _witness_raw(q, v, alpha, mu, e1, e2, g_cut=None, g0_cut=None):
    """Build a same-V graph with strictly more faces from a common-face pair
    that is not a 2-cut in the full graph.

    Returns a record dict; raises SurgeryError when the pair is a 2-cut in G
    and SurgeryInternalError when no reconnection yields the guaranteed gain.
    ``g_cut`` / ``g0_cut`` let a caller that already knows the 2-cut verdicts
    (the exhaustive scan) skip recomputing them.
    """
    if g_cut is None:
        g_cut = _components(q, v, alpha, mu, e1, e2, True)[1] > 1
    if g_cut:
        raise SurgeryError(f"pair {e1}, {e2} is a 2-cut in the full graph")
    if g0_cut is None:
        g0_cut = _components(q, v, alpha, mu, e1, e2, False)[1] > 1
    f_before = _face_count(q, v, alpha, mu)

    if not g0_cut:
        # case 1: reglue the half-lines the way that creates one more face
        for orientation in (0, 1):
            cand = _reglued(alpha, e1, e2, orientation)
            f_cand = _face_count(q, v, cand, mu)
            if f_cand == f_before + 1:
                return {
                    "case": 1,
                    "subcase": "reglue",
                    "f_before": f_before,
                    "f_after": f_cand,
                    "contractions": 0,
                    "loops_discarded": 0,
                    "contraction_f_preserved": True,
                    "intermediates": [],
                    "result": (q, v, cand, list(mu)),
                }
        raise SurgeryInternalError("neither reconnection gains a face")

    # case 2: reglue so the fermionic-only graph becomes disconnected, repair
    # connectivity by contracting bridging disorder lines, and restore the
    # vertex count by melonic insertions.  A contraction that closes
    # vertex-free loops drops one face per loop, so loop-free routes are
    # preferred; if no contraction route gains faces, fall back to the
    # reconnection that keeps the underlying graph connected when it happens
    # to gain faces outright.
    for allow_loops in (False, True):
        for orientation in (0, 1):
            cand = _reglued(alpha, e1, e2, orientation)
            comp, count = _components(q, v, cand, mu, None, None, False)
            if count == 1:
                continue
            found = _case2_search(q, v, cand, mu, allow_loops, comp, count)
            if found is None:
                continue
            rv, ra, rm, steps = found
            intermediates = [(q, v, list(cand), list(mu))]
            f_cur = _face_count(q, v, cand, mu)
            f_preserved = True
            total_loops = 0
            for sv, sa, sm, loops in steps:
                f_new = _face_count(q, sv, sa, sm)
                if f_new != f_cur - loops:
                    f_preserved = False
                f_cur = f_new
                total_loops += loops
                intermediates.append((q, sv, list(sa), list(sm)))
            cur_alpha, cur_mu, cur_v = list(ra), list(rm), rv
            while cur_v < v:
                cur_alpha, cur_mu = _first_insert_raw(q, cur_v, cur_alpha, cur_mu)
                cur_v += 2
            f_after = _face_count(q, cur_v, cur_alpha, cur_mu)
            if f_after <= f_before:
                continue
            return {
                "case": 2,
                "subcase": "contract" if total_loops == 0 else "contract_discard_loops",
                "f_before": f_before,
                "f_after": f_after,
                "contractions": len(steps),
                "loops_discarded": total_loops,
                "contraction_f_preserved": f_preserved,
                "intermediates": intermediates,
                "result": (q, cur_v, cur_alpha, cur_mu),
            }
    # last resort: accept any reconnection that gains faces outright while
    # keeping the full graph (disorder lines included) connected; preferred
    # when the fermionic-only graph also stays connected.  This covers V=2,
    # where no second disorder line exists to contract.
    fallback = None
    for orientation in (0, 1):
        cand = _reglued(alpha, e1, e2, orientation)
        _, count_full = _components(q, v, cand, mu, None, None, True)
        if count_full > 1:
            continue
        f_cand = _face_count(q, v, cand, mu)
        if f_cand <= f_before:
            continue
        _, count = _components(q, v, cand, mu, None, None, False)
        rec = {
            "case": 2,
            "subcase": "reglue_connected" if count == 1 else "reglue_g_connected",
            "f_before": f_before,
            "f_after": f_cand,
            "contractions": 0,
            "loops_discarded": 0,
            "contraction_f_preserved": True,
            "intermediates": [],
            "result": (q, v, cand, list(mu)),
        }
        if count == 1:
            return rec
        if fallback is None:
            fallback = rec
    if fallback is not None:
        return fallback
    raise SurgeryInternalError("no reconnection route gains a face")


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def _as_lines(graph, pair):
    if isinstance(pair, CommonFacePair):
        e1, e2 = pair.e1, pair.e2
    else:
        e1, e2 = pair
    e1 = tuple(sorted(e1))
    e2 = tuple(sorted(e2))
    for e in (e1, e2):
        if graph.alpha[e[0]] != e[1]:
            raise SurgeryError(f"{e} is not a fermionic line of the graph")
    if e1 == e2:
        raise SurgeryError("the two lines must be distinct")
    return e1, e2


def common_face_pairs(graph: StrandedGraph):
    """All unordered pairs of distinct fermionic lines sharing at least one face."""
    q, alpha, mu = graph.q, graph.alpha, graph.mu
    found = {}
    for orbit in _face_orbits(q, graph.v, alpha, mu):
        lines = []
        for s in orbit:
            t = mu[s // q] * q + s % q
            u = alpha[t]
            lines.append((t, u) if t < u else (u, t))
        uniq = sorted(set(lines))
        for i, e1 in enumerate(uniq):
            for e2 in uniq[i + 1:]:
                found.setdefault((e1, e2), orbit)
    return [CommonFacePair(e1, e2, face) for (e1, e2), face in sorted(found.items())]


def analyze_cut(graph: StrandedGraph, e1, e2) -> CutReport:
    """2-cut verdicts for a pair of fermionic lines, in the full graph and in
    the fermionic-only underlying graph."""
    e1, e2 = _as_lines(graph, (e1, e2))
    q, v, alpha, mu = graph.q, graph.v, graph.alpha, graph.mu
    comp_g, count_g = _components(q, v, alpha, mu, e1, e2, True)
    comp_g0, count_g0 = _components(q, v, alpha, mu, e1, e2, False)
    return CutReport(
        e1=e1,
        e2=e2,
        cut_in_g=count_g > 1,
        cut_in_g0=count_g0 > 1,
        sides_g=_sides(comp_g, count_g),
        sides_g0=_sides(comp_g0, count_g0),
    )


def reglue_gain_face(graph: StrandedGraph, pair) -> StrandedGraph:
    """Cut the pair and reglue the half-lines the unique way that creates one
    additional face.  Requires the pair not to be a 2-cut in the
    fermionic-only underlying graph."""
    e1, e2 = _as_lines(graph, pair)
    q, v, alpha, mu = graph.q, graph.v, graph.alpha, graph.mu
    _, count_g0 = _components(q, v, alpha, mu, e1, e2, False)
    if count_g0 > 1:
        raise SurgeryError(f"pair {e1}, {e2} is a 2-cut in the underlying graph")
    f_before = _face_count(q, v, alpha, mu)
    for orientation in (0, 1):
        cand = _reglued(alpha, e1, e2, orientation)
        if _face_count(q, v, cand, mu) == f_before + 1:
            return StrandedGraph(q, v, tuple(cand), mu)
    raise SurgeryInternalError("neither reconnection gains a face")


def contract_disorder_line(graph: StrandedGraph, e0) -> StrandedGraph:
    """Contract a disorder line: drop its endpoints and join the fermionic
    partners of facing slots, position by position.  The input may have a
    disconnected underlying graph.

    Fermionic chains confined to the removed pair close into vertex-free
    loops and are discarded, losing exactly one face each; a line bridging
    two components is the loop-free, face-preserving case.  Contracting a
    freshly inserted melon discards q-1 loops and recovers the pre-insertion
    graph exactly."""
    v_left, v_right = e0
    if not (0 <= v_left < graph.v) or graph.mu[v_left] != v_right:
        raise SurgeryError(f"{e0} is not a disorder line of the graph")
    alpha, mu, _ = _contract_raw(
        graph.q, graph.v, graph.alpha, graph.mu, v_left, allow_loops=True
    )
    return StrandedGraph(graph.q, graph.v - 2, tuple(alpha), tuple(mu))


@dataclass(frozen=True)
class WitnessRecord:
    """Audit trail of a non-maximality witness."""

    input: StrandedGraph
    e1: tuple
    e2: tuple
    case: int
    subcase: str
    f_before: int
    f_after: int
    loops_discarded: int
    intermediates: tuple
    result: StrandedGraph

    def to_dict(self) -> dict:
        from .graphio import graph_to_dict

        return {
            "input_graph": graph_to_dict(self.input),
            "pair": {"e1": list(self.e1), "e2": list(self.e2)},
            "case": self.case,
            "subcase": self.subcase,
            "f_before": self.f_before,
            "f_after": self.f_after,
            "loops_discarded": self.loops_discarded,
            "intermediate_graphs": [graph_to_dict(g) for g in self.intermediates],
            "witness_graph": graph_to_dict(self.result),
        }


def witness_audit(graph: StrandedGraph, pair) -> WitnessRecord:
    """Run the non-maximality surgery and keep every intermediate for audit."""
    e1, e2 = _as_lines(graph, pair)
    rec = _witness_raw(graph.q, graph.v, graph.alpha, graph.mu, e1, e2)
    intermediates = tuple(
        StrandedGraph(q, v, tuple(a), tuple(m)) for q, v, a, m in rec["intermediates"]
    )
    rq, rv, ra, rm = rec["result"]
    return WitnessRecord(
        input=graph,
        e1=e1,
        e2=e2,
        case=rec["case"],
        subcase=rec["subcase"],
        f_before=rec["f_before"],
        f_after=rec["f_after"],
        loops_discarded=rec["loops_discarded"],
        intermediates=intermediates,
        result=StrandedGraph(rq, rv, tuple(ra), tuple(rm)),
    )


def witness_non_maximal(graph: StrandedGraph, pair) -> StrandedGraph:
    """Given a common-face pair that is not a 2-cut in the full graph, return
    a graph with the same vertex count and strictly more faces."""
    return witness_audit(graph, pair).result
