"""Canonical keys for isomorphism-class deduplication at desk scale.

Two stranded graphs are isomorphic when a vertex relabeling, combined with
one position permutation per disorder line (the same at both endpoints, so
identity-form strands stay identity), maps one fermionic involution onto the
other.  The key is the lexicographic minimum of the relabeled involution over
that group, with the disorder matching normalized to (0-1, 2-3, ...).
Intended for small graphs only; the search is branch-and-bound over pair
placements with prefix pruning against the best encoding found so far.
"""

from __future__ import annotations

import itertools

from .core import StrandedGraph

MAX_V = 8
MAX_Q = 4


class SizeGuardError(ValueError):
    """Graph too large for brute-force canonicalization."""


def canonical_key(graph: StrandedGraph):
    """Opaque key equal for exactly the isomorphic graphs; guarded to V <= 8, q <= 4."""
    q, v = graph.q, graph.v
    if v > MAX_V or q > MAX_Q:
        raise SizeGuardError(f"canonical_key limited to V <= {MAX_V}, q <= {MAX_Q}")
    alpha, mu = graph.alpha, graph.mu
    pairs = graph.disorder_lines()
    n = q * v
    position_perms = list(itertools.permutations(range(q)))
    best = None

    # new_of[w] is the canonical label of original vertex w (-1 if unplaced);
    # sigma_of[w] is the position permutation applied at w.
    new_of = [-1] * v
    sigma_of = [None] * v
    old_of = [-1] * v

    def encoding_prefix(depth):
        """Relabeled alpha for canonical slots placed so far; None where the
        partner vertex is not placed yet."""
        enc = []
        for s_new in range(2 * depth * q):
            w_old = old_of[s_new // q]
            sigma = sigma_of[w_old]
            inv_m = sigma.index(s_new % q)
            t = alpha[w_old * q + inv_m]
            tw = t // q
            if new_of[tw] < 0:
                enc.append(None)
            else:
                enc.append(new_of[tw] * q + sigma_of[tw][t % q])
        return enc

    def rec(depth, used):
        nonlocal best
        if depth == len(pairs):
            key = tuple(encoding_prefix(depth))
            if best is None or key < best:
                best = key
            return
        for idx, (a, b) in enumerate(pairs):
            if used & (1 << idx):
                continue
            for x, y in ((a, b), (b, a)):
                for sigma in position_perms:
                    new_of[x] = 2 * depth
                    new_of[y] = 2 * depth + 1
                    old_of[2 * depth] = x
                    old_of[2 * depth + 1] = y
                    sigma_of[x] = sigma
                    sigma_of[y] = sigma
                    prune = False
                    if best is not None:
                        for pos, val in enumerate(encoding_prefix(depth + 1)):
                            if val is None:
                                break
                            if val != best[pos]:
                                prune = val > best[pos]
                                break
                    if not prune:
                        rec(depth + 1, used | (1 << idx))
                    new_of[x] = -1
                    new_of[y] = -1
                    sigma_of[x] = None
                    sigma_of[y] = None

    rec(0, 0)
    return (q, v, best)
