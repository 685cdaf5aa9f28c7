"""Graph file formats: JSON round-trip and DOT export."""

from __future__ import annotations

import json

from .core import InvalidGraphError, StrandedGraph, build_graph, slot_of


class GraphParseError(ValueError):
    """Raised when a graph file cannot be parsed or validated."""


def graph_to_dict(graph: StrandedGraph) -> dict:
    q = graph.q
    return {
        "q": q,
        "v": graph.v,
        "fermionic": [
            [list(slot_of(q, s)), list(slot_of(q, t))] for s, t in graph.fermionic_lines()
        ],
        "disorder": [list(pair) for pair in graph.disorder_lines()],
    }


def graph_from_dict(data: dict) -> StrandedGraph:
    try:
        q = data["q"]
        v = data["v"]
        fermionic = data["fermionic"]
        disorder = data["disorder"]
    except (KeyError, TypeError) as exc:
        raise GraphParseError(f"missing graph field: {exc}") from exc
    if not isinstance(q, int) or not isinstance(v, int):
        raise GraphParseError(f"q and v must be integers, got {q!r}, {v!r}")
    try:
        return build_graph(q, v, fermionic, disorder)
    except (InvalidGraphError, TypeError) as exc:
        raise GraphParseError(str(exc)) from exc


def save_graph(graph: StrandedGraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_dict(graph), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_graph(path) -> StrandedGraph:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphParseError(f"cannot read graph file {path}: {exc}") from exc
    return graph_from_dict(data)


def line_by_index(graph: StrandedGraph, index: int):
    """Fermionic line referenced by its rank in sorted (s, t) order."""
    lines = graph.fermionic_lines()
    if not 0 <= index < len(lines):
        raise GraphParseError(f"line index {index} out of range (graph has {len(lines)} lines)")
    return lines[index]


def graph_to_dot(graph: StrandedGraph, name: str = "G") -> str:
    """DOT rendering: solid fermionic edges, dashed strands grouped per disorder line.

    Each disorder line is drawn as q parallel dashed edges labeled by the
    strand position, so the full stranded structure is recoverable from
    the picture.
    """
    q = graph.q
    out = [f"graph {name} {{"]
    out.append("  node [shape=circle];")
    for s, t in graph.fermionic_lines():
        sv, sm = slot_of(q, s)
        tv, tm = slot_of(q, t)
        out.append(
            f'  {sv} -- {tv} [style=solid, taillabel="{sm}", headlabel="{tm}"];'
        )
    for v, w in graph.disorder_lines():
        for m in range(q):
            out.append(f'  {v} -- {w} [style=dashed, label="{m}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def save_dot(graph: StrandedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(graph_to_dot(graph))
