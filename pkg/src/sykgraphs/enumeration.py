"""Exhaustive and random generation of labeled stranded graphs at fixed (q, V),
classification by (F, delta), and machine checks of the degree bound and the
2-cut characterization of melonic graphs.

The enumeration runs over all pairs (fermionic perfect matching on the q*V
slots, disorder perfect matching on the V vertices).  Fermionic matchings are
generated in lexicographic pair order (always matching the smallest unmatched
slot first); a union-find over vertices prunes every branch in which a proper
component of the underlying graph has closed, so the generator only reaches
connected leaves.  The search space is partitioned by (disorder matching,
partner of slot 0), which makes worker runs shared-nothing and their merged
histograms independent of the worker count.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from random import Random
from typing import Iterator, Optional

from .core import StrandedGraph, _face_count, _g0_connected
from .melons import _is_melonic_raw
from .surgery import _witness_raw

DEFAULT_BUDGET = 10**8
BUDGET_ENV_VAR = "SYKGRAPHS_BUDGET"


class BudgetExceededError(RuntimeError):
    """Enumeration refused: the raw search space exceeds the budget."""

    def __init__(self, q: int, v: int, cardinality: int, budget: int):
        self.cardinality = cardinality
        self.budget = budget
        super().__init__(
            f"enumeration at q={q}, V={v} has {cardinality} raw structures, "
            f"over the budget of {budget}"
        )


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR)
    return int(raw) if raw else DEFAULT_BUDGET


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def raw_cardinality(q: int, v: int) -> int:
    """Number of (fermionic, disorder) matching pairs before the connectivity filter."""
    return _double_factorial(q * v - 1) * _double_factorial(v - 1)


def _check_params(q: int, v: int) -> None:
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if v < 2 or v % 2:
        raise ValueError(f"V must be even and >= 2, got {v}")


def _check_budget(q: int, v: int, budget: Optional[int]) -> int:
    budget = default_budget() if budget is None else budget
    cardinality = raw_cardinality(q, v)
    if cardinality > budget:
        raise BudgetExceededError(q, v, cardinality, budget)
    return budget


def _disorder_matchings(v: int):
    """All (V-1)!! vertex matchings, lexicographic, each as a flat involution."""
    mu = [-1] * v

    def rec(w):
        while w < v and mu[w] != -1:
            w += 1
        if w == v:
            yield tuple(mu)
            return
        for u in range(w + 1, v):
            if mu[u] == -1:
                mu[w] = u
                mu[u] = w
                yield from rec(w + 1)
                mu[w] = -1
                mu[u] = -1

    yield from rec(0)


def _fermionic_matchings(q, v, first_partner=None, prune=True):
    """Yield every fermionic perfect matching as a flat involution.

    The yielded list is a reused buffer: copy it before storing.  With
    ``prune`` on, branches whose partial matching closes a proper component
    of the underlying graph are skipped, so every leaf is connected; with it
    off, all (qV-1)!! matchings are produced.  ``first_partner`` restricts
    slot 0 to one partner, which partitions the space for parallel runs.
    """
    n = q * v
    alpha = [-1] * n
    parent = list(range(v))
    size = [1] * v
    free = [q] * v  # unmatched slots per component, valid at roots

    def find(w):
        while parent[w] != w:
            w = parent[w]
        return w

    def rec(s):
        while s < n and alpha[s] != -1:
            s += 1
        if s == n:
            yield alpha
            return
        lo = first_partner if s == 0 and first_partner is not None else s + 1
        hi = first_partner + 1 if s == 0 and first_partner is not None else n
        for t in range(lo, hi):
            if alpha[t] != -1:
                continue
            alpha[s] = t
            alpha[t] = s
            ru, rw = find(s // q), find(t // q)
            if ru != rw:
                if size[ru] < size[rw]:
                    ru, rw = rw, ru
                parent[rw] = ru
                size[ru] += size[rw]
                old_free = free[ru]
                free[ru] += free[rw] - 2
                merged = rw
            else:
                old_free = free[ru]
                free[ru] -= 2
                merged = None
            if not (prune and free[ru] == 0 and size[ru] < v):
                yield from rec(s + 1)
            free[ru] = old_free
            if merged is not None:
                size[ru] -= size[merged]
                parent[merged] = merged
            alpha[s] = -1
            alpha[t] = -1

    yield from rec(0)


def enumerate_graphs(
    q: int, v: int, budget: Optional[int] = None
) -> Iterator[StrandedGraph]:
    """Every labeled graph with connected underlying graph, exactly once."""
    _check_params(q, v)
    _check_budget(q, v, budget)
    for mu in _disorder_matchings(v):
        for alpha in _fermionic_matchings(q, v):
            yield StrandedGraph(q, v, tuple(alpha), mu)


def count_raw_structures(q: int, v: int) -> int:
    """Count all matching pairs by traversal, no connectivity filter."""
    per_mu = sum(1 for _ in _fermionic_matchings(q, v, prune=False))
    return per_mu * sum(1 for _ in _disorder_matchings(v))


def _random_matching(rng: Random, items):
    pool = list(items)
    pairing = {}
    while pool:
        a = pool.pop(0)
        b = pool.pop(rng.randrange(len(pool)))
        pairing[a] = b
        pairing[b] = a
    return pairing


def random_graph(q: int, v: int, seed: int) -> StrandedGraph:
    """Uniform over labeled matching pairs with connected underlying graph."""
    _check_params(q, v)
    return random_graph_rng(q, v, Random(seed))


def random_graph_rng(q: int, v: int, rng: Random) -> StrandedGraph:
    n = q * v
    while True:
        pairing = _random_matching(rng, range(n))
        alpha = tuple(pairing[s] for s in range(n))
        if _g0_connected(q, v, alpha):
            break
    pairing = _random_matching(rng, range(v))
    mu = tuple(pairing[w] for w in range(v))
    return StrandedGraph(q, v, alpha, mu)


# ---------------------------------------------------------------------------
# classification scan
# ---------------------------------------------------------------------------

@dataclass
class _ScanStats:
    total: int = 0
    histogram: dict = field(default_factory=dict)
    max_delta: Optional[int] = None
    n_melonic: int = 0
    n_delta1: int = 0
    n_both: int = 0
    corollary_violations: int = 0
    witness_checked: int = 0
    witness_case1: int = 0
    witness_case2: int = 0
    witness_failures: int = 0

    def merge(self, other: "_ScanStats") -> None:
        self.total += other.total
        for key, cnt in other.histogram.items():
            self.histogram[key] = self.histogram.get(key, 0) + cnt
        if other.max_delta is not None:
            self.max_delta = (
                other.max_delta
                if self.max_delta is None
                else max(self.max_delta, other.max_delta)
            )
        self.n_melonic += other.n_melonic
        self.n_delta1 += other.n_delta1
        self.n_both += other.n_both
        self.corollary_violations += other.corollary_violations
        self.witness_checked += other.witness_checked
        self.witness_case1 += other.witness_case1
        self.witness_case2 += other.witness_case2
        self.witness_failures += other.witness_failures


def _two_cut_tables(q, v, alpha, mu):
    """Sets of fermionic-line pairs whose removal along some proper vertex
    subset leaves exactly those two lines as the subset's edge boundary;
    all subsets are scanned by bitmask, counting parallel lines separately.

    ``cuts_g`` (disorder lines counted, so a crossing disorder line vetoes
    the subset) equals removal-disconnection of G: a subset crossed by no
    disorder line contains whole disorder pairs, so its fermionic boundary
    has even size and a nonempty boundary contained in the pair is the pair.

    ``cuts_g0`` is deliberately *not* removal-disconnection of G0: a pair
    containing a G0 bridge removal-disconnects G0 without any subset having
    the pair as its exact boundary.  The exact-boundary criterion is the one
    that matters for surgery dispatch — it is equivalent to "some reglue
    orientation disconnects G0", whereas regluing across a bridge always
    keeps G0 connected.
    """
    fermionic = [(s, s // q, t // q) for s, t in enumerate(alpha) if s < t]
    disorder = [(w, u) for w, u in enumerate(mu) if w < u]
    cuts_g = set()
    cuts_g0 = set()
    # masks containing vertex 0, proper subsets only
    for half in range(1 << (v - 1)):
        mask = (half << 1) | 1
        if mask == (1 << v) - 1:
            continue
        crossing = []
        for line, wu, wv in fermionic:
            if (mask >> wu & 1) != (mask >> wv & 1):
                crossing.append(line)
                if len(crossing) > 2:
                    break
        if len(crossing) > 2 or not crossing:
            continue
        d_cross = 0
        for w, u in disorder:
            if (mask >> w & 1) != (mask >> u & 1):
                d_cross += 1
                if d_cross > 2:
                    break
        if len(crossing) == 2:
            pair = (crossing[0], crossing[1])
            cuts_g0.add(pair)
            if d_cross == 0:
                cuts_g.add(pair)
    return cuts_g, cuts_g0


def _case1_gain_check(q, v, alpha, mu, e1, e2, f_before):
    """Inline case-1 witness: mutate, trace, restore.  Returns gained F or None."""
    x1, y1 = e1
    x2, y2 = e2
    for joins in (((x1, x2), (y1, y2)), ((x1, y2), (y1, x2))):
        for s, t in joins:
            alpha[s] = t
            alpha[t] = s
        f_cand = _face_count(q, v, alpha, mu)
        connected = _g0_connected(q, v, alpha)
        # restore the original pairing
        alpha[x1] = y1
        alpha[y1] = x1
        alpha[x2] = y2
        alpha[y2] = x2
        if f_cand == f_before + 1 and connected:
            return f_cand
    return None


def _melonic4(q, alpha, p0, p1):
    """Melonic verdict at V=4: some disorder pair is a melon site whose
    removal leaves the other pair parallel with a same-position rejoin."""
    for (a, b), _ in ((p0, p1), (p1, p0)):
        base_a = a * q
        base_b = b * q
        k = -1
        for m in range(q):
            if alpha[base_a + m] != base_b + m:
                if k >= 0:
                    k = -2
                    break
                k = m
        if k < 0:
            continue
        x = alpha[base_a + k]
        y = alpha[base_b + k]
        mx = x % q
        if y % q != mx:
            continue
        bc = x - mx
        bd = y - mx
        if bc == bd:
            continue
        ok = True
        for m in range(q):
            if m != mx and alpha[bc + m] != bd + m:
                ok = False
                break
        if ok:
            return True
    return False


def _scan_task(args):
    """Classify every graph in one partition; returns partial statistics.

    This is the hot loop of the exhaustive scan, so it trades clarity for
    speed: reused stamp arrays instead of per-graph allocations, orbit ids
    recorded during the face trace so a reconnection's face count can be
    recomputed from the affected orbits only, and per-partition
    precomputation of everything that depends on the disorder matching
    alone.  Unit tests cross-check it against the readable graph-level
    operations.
    """
    q, v, mu, first_partner, check_corollary, check_witness = args
    n = q * v
    half = (q - 1) * v // 2
    strand = [mu[s // q] * q + s % q for s in range(n)]
    stats = _ScanStats()
    hist = stats.histogram
    seen = [0] * n  # face-scan stamps
    oid = [0] * n  # face orbit id per slot, from a global counter
    wseen = [0] * n  # stamps for the incremental re-trace
    stamp = 0
    wstamp = 0
    oid_next = 0
    # proper vertex subsets containing vertex 0, with the number of disorder
    # lines they cut (fixed per partition since mu is fixed)
    masks = []
    full_mask = (1 << v) - 1
    disorder = [(w, u) for w, u in enumerate(mu) if w < u]
    for half_mask in range(1 << (v - 1)):
        mask = (half_mask << 1) | 1
        if mask == full_mask:
            continue
        d_cross = sum(1 for w, u in disorder if (mask >> w & 1) != (mask >> u & 1))
        masks.append((mask, d_cross))
    pairs4 = ((disorder[0], disorder[1]) if v == 4 else None)
    nlines = n >> 1
    line_lo = [0] * nlines
    line_bits = [0] * nlines
    for alpha in _fermionic_matchings(q, v, first_partner=first_partner):
        stamp += 1
        orbits = 0
        face_lines = []
        for s0 in range(n):
            if seen[s0] == stamp:
                continue
            orbits += 1
            oid_next += 1
            lines = set()
            s = s0
            while seen[s] != stamp:
                seen[s] = stamp
                oid[s] = oid_next
                t = strand[s]
                u = alpha[t]
                lines.add(t if t < u else u)
                s = u
            # each face appears as two orbits (one per direction); keep only
            # line sets that can hold a pair, deduplicated below
            if len(lines) > 1:
                face_lines.append(lines)
        f_count = orbits >> 1
        delta = f_count - half
        key = (f_count, delta)
        hist[key] = hist.get(key, 0) + 1
        stats.total += 1
        if stats.max_delta is None or delta > stats.max_delta:
            stats.max_delta = delta
        if pairs4 is not None:
            melonic = _melonic4(q, alpha, pairs4[0], pairs4[1])
        else:
            melonic = _is_melonic_raw(q, v, alpha, mu)
        if melonic:
            stats.n_melonic += 1
        if delta == 1:
            stats.n_delta1 += 1
            if melonic:
                stats.n_both += 1
        if not check_corollary:
            continue
        pairs = set()
        for lines in face_lines:
            uniq = sorted(lines)
            for i, l1 in enumerate(uniq):
                for l2 in uniq[i + 1:]:
                    pairs.add((l1, l2))
        if not pairs:
            if not melonic:
                stats.corollary_violations += 1
            continue
        i = 0
        for s in range(n):
            t = alpha[s]
            if s < t:
                line_lo[i] = s
                line_bits[i] = ((1 << (s // q)), (1 << (t // q)))
                i += 1
        cuts_g = set()
        cuts_g0 = set()
        for mask, d_cross in masks:
            c0 = -1
            c1 = -1
            over = False
            for i in range(nlines):
                bu, bw = line_bits[i]
                if ((mask & bu) != 0) != ((mask & bw) != 0):
                    if c0 < 0:
                        c0 = i
                    elif c1 < 0:
                        c1 = i
                    else:
                        over = True
                        break
            if over or c1 < 0:
                continue
            pair = (line_lo[c0], line_lo[c1])
            cuts_g0.add(pair)
            if d_cross == 0:
                cuts_g.add(pair)
        violating = pairs - cuts_g
        if (not violating) != melonic:
            stats.corollary_violations += 1
        if not check_witness:
            continue
        for l1, l2 in violating:
            y1 = alpha[l1]
            y2 = alpha[l2]
            stats.witness_checked += 1
            if (l1, l2) not in cuts_g0:
                # case 1: some reconnection gains exactly one face, and the
                # underlying graph stays connected because no vertex subset
                # has the pair as its exact boundary (see _two_cut_tables),
                # so neither reglue orientation can separate it.  The new
                # face count is recomputed from the
                # affected orbits only: F' = F + (new cycles - old orbits
                # through the four rewired successor positions) / 2.
                stats.witness_case1 += 1
                p1 = strand[l1]
                p2 = strand[y1]
                p3 = strand[l2]
                p4 = strand[y2]
                o1 = oid[p1]
                o2 = oid[p2]
                o3 = oid[p3]
                o4 = oid[p4]
                k = 1
                if o2 != o1:
                    k += 1
                if o3 != o1 and o3 != o2:
                    k += 1
                if o4 != o1 and o4 != o2 and o4 != o3:
                    k += 1
                gained = False
                for t1, t2 in ((l2, y2), (y2, l2)):
                    alpha[l1] = t1
                    alpha[t1] = l1
                    alpha[y1] = t2
                    alpha[t2] = y1
                    wstamp += 1
                    ncyc = 0
                    for p in (p1, p2, p3, p4):
                        if wseen[p] == wstamp:
                            continue
                        ncyc += 1
                        s = p
                        while wseen[s] != wstamp:
                            wseen[s] = wstamp
                            s = alpha[strand[s]]
                    alpha[l1] = y1
                    alpha[y1] = l1
                    alpha[l2] = y2
                    alpha[y2] = l2
                    if ncyc - k == 2:
                        gained = True
                        break
                if not gained:
                    stats.witness_failures += 1
            else:
                stats.witness_case2 += 1
                try:
                    rec = _witness_raw(
                        q, v, list(alpha), list(mu), (l1, y1), (l2, y2),
                        g_cut=False, g0_cut=True,
                    )
                except Exception:
                    stats.witness_failures += 1
                    continue
                ok = (
                    rec["f_after"] > f_count
                    and rec["result"][1] == v
                    and rec["contraction_f_preserved"]
                )
                if not ok:
                    stats.witness_failures += 1
    return stats


@dataclass
class EnumerationReport:
    """Histogram of (F, delta) over all labeled graphs at fixed (q, V), with
    the degree-bound and 2-cut-characterization verdicts."""

    q: int
    v: int
    total: int
    histogram: dict
    max_delta: Optional[int]
    melonic_count: int
    theorem_ok: bool
    corollary_ok: Optional[bool]
    raw_cardinality: int
    budget: int
    workers: int
    wall_time_s: float
    witness_checked: int = 0
    witness_case1: int = 0
    witness_case2: int = 0
    witness_failures: int = 0

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "v": self.v,
            "total": self.total,
            "histogram": [
                {"F": f, "delta": d, "count": c}
                for (f, d), c in sorted(self.histogram.items())
            ],
            "max_delta": self.max_delta,
            "melonic_count": self.melonic_count,
            "theorem_ok": self.theorem_ok,
            "corollary_ok": self.corollary_ok,
            "raw_cardinality": self.raw_cardinality,
            "witness": {
                "checked": self.witness_checked,
                "case1": self.witness_case1,
                "case2": self.witness_case2,
                "failures": self.witness_failures,
            },
            "meta": {
                "budget": self.budget,
                "workers": self.workers,
                "wall_time_s": self.wall_time_s,
            },
        }

    def to_csv_rows(self):
        """One row per (F, delta) histogram cell."""
        rows = ["q,v,F,delta,count"]
        for (f, d), c in sorted(self.histogram.items()):
            rows.append(f"{self.q},{self.v},{f},{d},{c}")
        return rows


def classify_all(
    q: int,
    v: int,
    budget: Optional[int] = None,
    workers: int = 1,
    check_corollary: bool = True,
    check_witness: bool = False,
) -> EnumerationReport:
    """Run the full classification scan over every labeled graph at (q, V)."""
    _check_params(q, v)
    budget = _check_budget(q, v, budget)
    start = time.monotonic()
    n = q * v
    tasks = [
        (q, v, mu, first_partner, check_corollary, check_witness)
        for mu in _disorder_matchings(v)
        for first_partner in range(1, n)
    ]
    merged = _ScanStats()
    if workers <= 1:
        for task in tasks:
            merged.merge(_scan_task(task))
    else:
        with Pool(workers) as pool:
            for part in pool.imap(_scan_task, tasks):
                merged.merge(part)
    theorem_ok = (
        merged.max_delta == 1
        and merged.n_delta1 == merged.n_both
        and merged.n_melonic == merged.n_both
    )
    return EnumerationReport(
        q=q,
        v=v,
        total=merged.total,
        histogram=merged.histogram,
        max_delta=merged.max_delta,
        melonic_count=merged.n_melonic,
        theorem_ok=theorem_ok,
        corollary_ok=(merged.corollary_violations == 0) if check_corollary else None,
        raw_cardinality=raw_cardinality(q, v),
        budget=budget,
        workers=workers,
        wall_time_s=time.monotonic() - start,
        witness_checked=merged.witness_checked,
        witness_case1=merged.witness_case1,
        witness_case2=merged.witness_case2,
        witness_failures=merged.witness_failures,
    )


def verify_theorem(
    q: int,
    v: int,
    budget: Optional[int] = None,
    workers: int = 1,
    check_witness: bool = False,
) -> EnumerationReport:
    """Exhaustively check that the degree is bounded by 1, that the degree-1
    class is exactly the melonic class, and that melonic graphs are exactly
    those whose common-face pairs are all 2-cuts."""
    return classify_all(
        q, v, budget=budget, workers=workers, check_corollary=True,
        check_witness=check_witness,
    )
