"""Melonic moves, greedy recognition, certificates, gluing, generation."""

import itertools
import random

import pytest

from sykgraphs import (
    MelonError,
    degree,
    find_melons,
    g_min,
    generate_melonic,
    is_melonic,
    melonic_insert,
    random_graph,
    remove_melon,
    star_glue,
    trace_faces,
)


def _random_melonic(rng, q, v):
    graph = g_min(q)
    while graph.v < v:
        lines = graph.fermionic_lines()
        line = lines[rng.randrange(len(lines))]
        graph = melonic_insert(graph, line, rng.randrange(q))
    return graph


def test_insert_adds_q_minus_1_faces_on_any_graph():
    rng = random.Random(3)
    for _ in range(30):
        q = rng.choice((2, 3, 4))
        g = random_graph(q, rng.choice((2, 4)), rng.randrange(1 << 30))
        f = trace_faces(g).F
        lines = g.fermionic_lines()
        line = lines[rng.randrange(len(lines))]
        h = melonic_insert(g, line, rng.randrange(q))
        assert h.v == g.v + 2
        assert trace_faces(h).F == f + q - 1


def test_insert_rejects_bad_arguments():
    g = g_min(2)
    with pytest.raises(MelonError):
        melonic_insert(g, (0, 1), 0)  # not a line
    with pytest.raises(MelonError):
        melonic_insert(g, g.fermionic_lines()[0], 5)  # position out of range


def test_find_melons_terminal_and_sites():
    assert find_melons(g_min(3)) == []
    g = melonic_insert(g_min(3), g_min(3).fermionic_lines()[0], 1)
    sites = find_melons(g)
    assert sites, "a fresh insertion must be a removable melon"
    for site in sites:
        assert g.mu[site.a] == site.b
        reduced = remove_melon(g, site)
        assert reduced.v == g.v - 2


def test_remove_melon_inverts_insert():
    rng = random.Random(5)
    for _ in range(20):
        q = rng.choice((2, 3))
        g = _random_melonic(rng, q, rng.choice((4, 6)))
        f = trace_faces(g).F
        lines = g.fermionic_lines()
        h = melonic_insert(g, lines[rng.randrange(len(lines))], rng.randrange(q))
        site = next(s for s in find_melons(h) if s.a == g.v)
        assert remove_melon(h, site) == g
        assert trace_faces(h).F == f + q - 1


def test_is_melonic_on_generated_graphs():
    rng = random.Random(9)
    for _ in range(25):
        q = rng.choice((2, 3, 4))
        g = _random_melonic(rng, q, rng.choice((4, 6, 8)))
        cert = is_melonic(g)
        assert cert.melonic
        assert cert.terminal.v == 2
        assert len(cert.steps) == (g.v - 2) // 2


def test_certificate_replay_reconstructs_input_exactly():
    rng = random.Random(13)
    for _ in range(20):
        q = rng.choice((2, 3))
        if rng.random() < 0.5:
            g = _random_melonic(rng, q, 6)
        else:
            g = random_graph(q, 4, rng.randrange(1 << 30))
        cert = is_melonic(g)
        assert cert.replay() == g


def test_greedy_reduction_is_confluent():
    # the verdict must not depend on which melon site is eliminated first
    rng = random.Random(17)
    for seed in range(40):
        g = random_graph(3, 4, seed)
        verdict = is_melonic(g).melonic
        for _ in range(5):
            assert is_melonic(g, rng=rng).melonic == verdict


def test_non_melonic_detected():
    # the two-vertex crossing graph at q=2 has F=1, delta=0
    from sykgraphs import from_involutions

    g = from_involutions(2, 2, (1, 0, 3, 2), (1, 0))
    cert = is_melonic(g)
    assert not cert.melonic
    assert degree(g).delta < 1


def test_star_glue_of_melonic_is_melonic():
    rng = random.Random(21)
    for _ in range(10):
        q = rng.choice((2, 3))
        g1 = _random_melonic(rng, q, 4)
        g2 = _random_melonic(rng, q, rng.choice((2, 4)))
        lines1 = g1.fermionic_lines()
        lines2 = g2.fermionic_lines()
        e1 = lines1[rng.randrange(len(lines1))]
        e2 = lines2[rng.randrange(len(lines2))]
        f1 = trace_faces(g1).F
        f2 = trace_faces(g2).F
        for orientation in (0, 1):
            glued = star_glue(g1, e1, g2, e2, orientation)
            assert glued.v == g1.v + g2.v
            assert trace_faces(glued).F == f1 + f2 - 1
            assert is_melonic(glued).melonic


def test_star_glue_rejects_mismatched_q():
    with pytest.raises(MelonError):
        star_glue(g_min(2), g_min(2).fermionic_lines()[0],
                  g_min(3), g_min(3).fermionic_lines()[0], 0)


def test_generate_melonic_exhaustive_matches_enumeration():
    from sykgraphs import classify_all

    graphs = list(generate_melonic(2, 4))
    assert len(graphs) == len(set(graphs)), "labeled duplicates"
    assert all(g.v == 4 and is_melonic(g).melonic for g in graphs)
    report = classify_all(2, 4)
    assert len(graphs) == report.melonic_count


def test_generate_melonic_random_is_seed_deterministic():
    a = list(itertools.islice(generate_melonic(3, 8, mode="random", seed=4), 5))
    b = list(itertools.islice(generate_melonic(3, 8, mode="random", seed=4), 5))
    c = list(itertools.islice(generate_melonic(3, 8, mode="random", seed=5), 5))
    assert a == b
    assert a != c
    assert all(g.v == 8 and is_melonic(g).melonic for g in a)
