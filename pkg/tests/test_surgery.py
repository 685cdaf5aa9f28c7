"""Common-face pairs, 2-cut analysis, contraction, and the witness surgery."""

import random

import pytest

from sykgraphs import (
    SurgeryError,
    analyze_cut,
    common_face_pairs,
    contract_disorder_line,
    degree,
    enumerate_graphs,
    face_line_sets,
    g_min,
    is_melonic,
    melonic_insert,
    random_graph,
    reglue_gain_face,
    trace_faces,
    witness_audit,
    witness_non_maximal,
)


def test_common_face_pairs_consistent_with_face_line_sets():
    for seed in range(15):
        g = random_graph(3, 4, seed)
        pairs = {(p.e1, p.e2) for p in common_face_pairs(g)}
        expected = set()
        for lines in face_line_sets(g):
            uniq = sorted(lines)
            for i, l1 in enumerate(uniq):
                for l2 in uniq[i + 1:]:
                    e1 = tuple(sorted((l1, g.alpha[l1])))
                    e2 = tuple(sorted((l2, g.alpha[l2])))
                    expected.add((e1, e2))
        assert pairs == expected


def test_cut_in_g_implies_cut_in_g0():
    for seed in range(15):
        g = random_graph(2, 6, seed)
        for p in common_face_pairs(g):
            report = analyze_cut(g, p.e1, p.e2)
            if report.cut_in_g:
                assert report.cut_in_g0
                assert report.sides_g is not None
            if not report.cut_in_g0:
                assert report.sides_g0 is None


def test_g_min_has_no_common_face_pairs():
    # every face of g_min holds a single line, so the corollary is vacuous
    for q in (2, 3, 4):
        assert common_face_pairs(g_min(q)) == []


def test_analyze_cut_on_melonic_pairs():
    # the corollary direction checked directly: every common-face pair of a
    # melonic graph is a 2-cut in the full graph (hence also in G0)
    g = melonic_insert(g_min(3), g_min(3).fermionic_lines()[0], 1)
    pairs = common_face_pairs(g)
    assert pairs, "a V=4 melonic graph has common-face pairs"
    for p in pairs:
        report = analyze_cut(g, p.e1, p.e2)
        assert report.cut_in_g and report.cut_in_g0
        assert sorted(w for side in report.sides_g for w in side) == list(range(g.v))


def test_reglue_gain_face_gains_exactly_one():
    checked = 0
    for seed in range(60):
        g = random_graph(3, 4, seed)
        f = trace_faces(g).F
        for p in common_face_pairs(g):
            if analyze_cut(g, p.e1, p.e2).cut_in_g0:
                continue
            h = reglue_gain_face(g, p)
            assert trace_faces(h).F == f + 1
            assert h.v == g.v
            checked += 1
    assert checked > 10


def test_reglue_rejects_g0_cut_pairs():
    g = melonic_insert(g_min(2), g_min(2).fermionic_lines()[0], 0)
    p = common_face_pairs(g)[0]
    assert analyze_cut(g, p.e1, p.e2).cut_in_g0
    with pytest.raises(SurgeryError):
        reglue_gain_face(g, p)


def test_contract_inverts_melonic_insert():
    rng = random.Random(2)
    for _ in range(15):
        q = rng.choice((2, 3, 4))
        g = random_graph(q, 2, rng.randrange(1 << 30))
        lines = g.fermionic_lines()
        h = melonic_insert(g, lines[rng.randrange(len(lines))], rng.randrange(q))
        assert contract_disorder_line(h, (g.v, g.v + 1)) == g


def test_contract_drops_one_face_per_closed_loop():
    from sykgraphs.surgery import _contract_raw

    loopy = 0
    loop_free = 0
    for g in enumerate_graphs(2, 4):
        _, _, loops = _contract_raw(g.q, g.v, g.alpha, g.mu, 0, allow_loops=True)
        h = contract_disorder_line(g, (0, g.mu[0]))
        assert trace_faces(h).F == trace_faces(g).F - loops
        if loops:
            loopy += 1
        else:
            loop_free += 1
    assert loopy > 0 and loop_free > 0


def test_contract_rejects_non_disorder_edge():
    g = g_min(2)
    with pytest.raises(SurgeryError):
        contract_disorder_line(melonic_insert(g, g.fermionic_lines()[0], 0), (0, 2))


def test_witness_gains_faces_and_preserves_v():
    cases = set()
    for seed in range(80):
        g = random_graph(3, 4, seed)
        f = trace_faces(g).F
        for p in common_face_pairs(g):
            report = analyze_cut(g, p.e1, p.e2)
            if report.cut_in_g:
                with pytest.raises(SurgeryError):
                    witness_non_maximal(g, p)
                continue
            rec = witness_audit(g, p)
            assert rec.f_before == f
            assert rec.f_after > f
            assert rec.result.v == g.v
            assert degree(rec.result).F == rec.f_after
            assert rec.case == (2 if report.cut_in_g0 else 1)
            if rec.case == 1:
                assert rec.f_after == f + 1
            cases.add(rec.case)
    assert cases == {1, 2}


def test_witness_case2_records_contraction_bookkeeping():
    found = False
    for seed in range(200):
        g = random_graph(2, 4, seed)
        for p in common_face_pairs(g):
            report = analyze_cut(g, p.e1, p.e2)
            if report.cut_in_g or not report.cut_in_g0:
                continue
            rec = witness_audit(g, p)
            assert rec.case == 2
            if rec.subcase in ("contract", "contract_discard_loops"):
                assert rec.intermediates, "contraction route keeps intermediates"
                found = True
    assert found


def test_witness_record_serializes():
    for seed in range(40):
        g = random_graph(3, 4, seed)
        for p in common_face_pairs(g):
            if analyze_cut(g, p.e1, p.e2).cut_in_g:
                continue
            data = witness_audit(g, p).to_dict()
            assert data["f_after"] > data["f_before"]
            assert data["witness_graph"]["v"] == g.v
            return
    pytest.fail("no witnessable pair found")
