"""Melonic moves, recognition by greedy reduction, gluing and generation."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Optional

from .core import StrandedGraph, g_min


class MelonError(ValueError):
    """Raised for invalid line references or melon sites."""


@dataclass(frozen=True)
class MelonSite:
    """An elementary melon: disorder partners a < b whose fermionic lines are
    parallel to the strands at every position except ``k``."""

    a: int
    b: int
    k: int


@dataclass(frozen=True)
class MelonRemoval:
    """One reduction step: the site eliminated, plus the fermionic line created
    by joining the two external half-lines, recorded in the labels of the
    reduced graph (a-side slot first)."""

    a: int
    b: int
    k: int
    rejoined: tuple

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "k": self.k, "rejoined": list(self.rejoined)}


@dataclass(frozen=True)
class ReductionCertificate:
    """Witness of a greedy melon reduction.

    ``melonic`` is true iff the terminal graph is the two-vertex graph with
    parallel lines.  :meth:`replay` rebuilds the input exactly by running
    the eliminations backwards as insertions and undoing the relabelings.
    """

    steps: tuple
    terminal: StrandedGraph
    melonic: bool

    def replay(self) -> StrandedGraph:
        graph = self.terminal
        # phi maps vertex labels of the partially-reduced graph to labels
        # of the replay graph; identity at the terminal by construction.
        phi = list(range(graph.v))
        q = graph.q
        for step in reversed(self.steps):
            x, y = step.rejoined
            px = phi[x // q] * q + x % q
            py = phi[y // q] * q + y % q
            new_a, new_b = graph.v, graph.v + 1
            graph = melonic_insert(graph, (px, py), step.k)
            lifted = [0] * (len(phi) + 2)
            for w in range(len(phi) + 2):
                if w == step.a:
                    lifted[w] = new_a
                elif w == step.b:
                    lifted[w] = new_b
                else:
                    lifted[w] = phi[w - (w > step.a) - (w > step.b)]
            phi = lifted
        # invert the accumulated relabeling so the result matches the input
        inverse = [0] * len(phi)
        for w, img in enumerate(phi):
            inverse[img] = w
        return graph.relabeled(inverse)

    def to_dict(self) -> dict:
        from .graphio import graph_to_dict

        return {
            "melonic": self.melonic,
            "steps": [step.to_dict() for step in self.steps],
            "terminal": graph_to_dict(self.terminal),
        }


def _check_line(graph: StrandedGraph, line) -> tuple:
    x, y = line
    if not (0 <= x < graph.n_slots) or graph.alpha[x] != y:
        raise MelonError(f"{line!r} is not a fermionic line of the graph")
    return x, y


def melonic_insert(graph: StrandedGraph, line, k: int) -> StrandedGraph:
    """Insert a two-point melon on a fermionic line, external legs at position k.

    The line (x, y) is split into x-(a, k) and (b, k)-y where a, b are the
    two new vertices; positions m != k are paired in parallel.  Adds q - 1
    faces for every input.
    """
    q, v = graph.q, graph.v
    x, y = _check_line(graph, line)
    if not 0 <= k < q:
        raise MelonError(f"position {k} out of range for q={q}")
    a, b = v, v + 1
    alpha = list(graph.alpha) + [0] * (2 * q)
    for m in range(q):
        if m != k:
            alpha[a * q + m] = b * q + m
            alpha[b * q + m] = a * q + m
    alpha[x] = a * q + k
    alpha[a * q + k] = x
    alpha[b * q + k] = y
    alpha[y] = b * q + k
    mu = graph.mu + (b, a)
    return StrandedGraph(q, v + 2, tuple(alpha), mu)


def find_melons(graph: StrandedGraph):
    """All elementary melon sites; the two-vertex graph is terminal and has none."""
    if graph.v == 2:
        return []
    q, alpha, mu = graph.q, graph.alpha, graph.mu
    sites = []
    for a in range(graph.v):
        b = mu[a]
        if b < a:
            continue
        k = -1
        for m in range(q):
            if alpha[a * q + m] != b * q + m:
                if k >= 0:
                    k = -2
                    break
                k = m
        if k >= 0:
            sites.append(MelonSite(a, b, k))
    return sites


def _remove_melon(graph: StrandedGraph, site: MelonSite):
    """Eliminate a melon; returns (reduced graph, rejoined line in new labels)."""
    q, v = graph.q, graph.v
    a, b, k = site.a, site.b, site.k
    if v < 4:
        raise MelonError("cannot remove a melon from a two-vertex graph")
    if not (0 <= a < v and graph.mu[a] == b and a < b and 0 <= k < q):
        raise MelonError(f"{site} is not a melon site of the graph")
    for m in range(q):
        parallel = graph.alpha[a * q + m] == b * q + m
        if parallel == (m == k):
            raise MelonError(f"{site} is not a melon site of the graph")
    x = graph.alpha[a * q + k]
    y = graph.alpha[b * q + k]
    vmap = [w - (w > a) - (w > b) for w in range(v)]

    def smap(s):
        return vmap[s // q] * q + s % q

    alpha = [0] * (q * (v - 2))
    for s, t in enumerate(graph.alpha):
        if s // q in (a, b) or t // q in (a, b):
            continue
        alpha[smap(s)] = smap(t)
    alpha[smap(x)] = smap(y)
    alpha[smap(y)] = smap(x)
    mu = [0] * (v - 2)
    for w, u in enumerate(graph.mu):
        if w not in (a, b):
            mu[vmap[w]] = vmap[u]
    reduced = StrandedGraph(q, v - 2, tuple(alpha), tuple(mu))
    return reduced, (smap(x), smap(y))


def remove_melon(graph: StrandedGraph, site: MelonSite) -> StrandedGraph:
    """Inverse of the melonic move: drop the site, rejoin the external legs."""
    return _remove_melon(graph, site)[0]


def is_melonic(graph: StrandedGraph, rng: Optional[random.Random] = None) -> ReductionCertificate:
    """Reduce greedily until no melon remains; melonic iff the terminal is the
    parallel two-vertex graph.  ``rng`` randomizes the elimination order
    (used to test order-independence); default is first-site-first."""
    steps = []
    while graph.v > 2:
        sites = find_melons(graph)
        if not sites:
            return ReductionCertificate(tuple(steps), graph, False)
        site = sites[0] if rng is None else rng.choice(sites)
        graph, rejoined = _remove_melon(graph, site)
        steps.append(MelonRemoval(site.a, site.b, site.k, rejoined))
    q = graph.q
    melonic = all(graph.alpha[m] == q + m for m in range(q))
    return ReductionCertificate(tuple(steps), graph, melonic)


def _is_melonic_raw(q: int, v: int, alpha, mu) -> bool:
    """Verdict-only reduction on flat lists; hot path for the enumerator."""
    alpha = list(alpha)
    mu = list(mu)
    while v > 2:
        found = None
        for a in range(v):
            b = mu[a]
            if b < a:
                continue
            k = -1
            for m in range(q):
                if alpha[a * q + m] != b * q + m:
                    if k >= 0:
                        k = -2
                        break
                    k = m
            if k >= 0:
                found = (a, b, k)
                break
        if found is None:
            return False
        a, b, k = found
        x = alpha[a * q + k]
        y = alpha[b * q + k]
        vmap = [w - (w > a) - (w > b) for w in range(v)]
        new_alpha = [0] * (q * (v - 2))
        for s, t in enumerate(alpha):
            sv, tv = s // q, t // q
            if sv == a or sv == b or tv == a or tv == b:
                continue
            new_alpha[vmap[sv] * q + s % q] = vmap[tv] * q + t % q
        xs = vmap[x // q] * q + x % q
        ys = vmap[y // q] * q + y % q
        new_alpha[xs] = ys
        new_alpha[ys] = xs
        new_mu = [0] * (v - 2)
        for w, u in enumerate(mu):
            if w != a and w != b:
                new_mu[vmap[w]] = vmap[u]
        alpha, mu, v = new_alpha, new_mu, v - 2
    return all(alpha[m] == q + m for m in range(q))


def star_glue(
    g1: StrandedGraph, e1, g2: StrandedGraph, e2, orientation: int
) -> StrandedGraph:
    """Cut one fermionic line in each graph and cross-join the half-lines.

    With e1 = (x1, y1) and e2 = (x2, y2), orientation 0 joins x1-x2 and
    y1-y2; orientation 1 joins x1-y2 and y1-x2.  Vertices of ``g2`` are
    relabeled after those of ``g1``.
    """
    if g1.q != g2.q:
        raise MelonError(f"strand counts differ: {g1.q} vs {g2.q}")
    if orientation not in (0, 1):
        raise MelonError(f"orientation must be 0 or 1, got {orientation}")
    q = g1.q
    x1, y1 = _check_line(g1, e1)
    x2, y2 = _check_line(g2, e2)
    shift_v, shift_s = g1.v, g1.n_slots
    alpha = list(g1.alpha) + [t + shift_s for t in g2.alpha]
    mu = list(g1.mu) + [w + shift_v for w in g2.mu]
    x2 += shift_s
    y2 += shift_s
    if orientation == 0:
        joins = ((x1, x2), (y1, y2))
    else:
        joins = ((x1, y2), (y1, x2))
    for s, t in joins:
        alpha[s] = t
        alpha[t] = s
    return StrandedGraph(q, g1.v + g2.v, tuple(alpha), tuple(mu))


def _insertion_targets(graph: StrandedGraph):
    return [(line, k) for line in graph.fermionic_lines() for k in range(graph.q)]


def generate_melonic(
    q: int, v: int, mode: str = "exhaustive", seed: int = 0
) -> Iterator[StrandedGraph]:
    """Melonic graphs on ``v`` vertices built from insertion histories.

    Exhaustive mode yields every labeled melonic graph exactly once
    (insertion histories, closed under vertex relabeling, deduplicated by
    labeled equality).  Random mode is an endless seeded stream of graphs
    drawn by uniform random insertion choices.
    """
    if v < 2 or v % 2:
        raise MelonError(f"V must be even and >= 2, got {v}")
    base = g_min(q)
    if mode == "random":
        return _random_melonic_stream(base, v, seed)
    if mode != "exhaustive":
        raise MelonError(f"unknown mode {mode!r}")
    return iter(_exhaustive_melonic(base, v))


def _random_melonic_stream(base: StrandedGraph, v: int, seed: int) -> Iterator[StrandedGraph]:
    rng = random.Random(seed)
    while True:
        graph = base
        while graph.v < v:
            line, k = rng.choice(_insertion_targets(graph))
            graph = melonic_insert(graph, line, k)
        yield graph


def _exhaustive_melonic(base: StrandedGraph, v: int):
    layer = {(base.alpha, base.mu)}
    vv = 2
    while vv < v:
        nxt = set()
        for alpha, mu in layer:
            graph = StrandedGraph(base.q, vv, alpha, mu)
            for line, k in _insertion_targets(graph):
                big = melonic_insert(graph, line, k)
                nxt.add((big.alpha, big.mu))
        layer = nxt
        vv += 2
    # insertion histories always label new vertices last; close under
    # relabeling to reach every labeled representative
    q = base.q
    seen = set()
    for alpha, mu in layer:
        graph = StrandedGraph(q, v, alpha, mu)
        for perm in itertools.permutations(range(v)):
            relab = graph.relabeled(perm)
            seen.add((relab.alpha, relab.mu))
    return [StrandedGraph(q, v, alpha, mu) for alpha, mu in sorted(seen)]
