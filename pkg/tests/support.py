"""Shared oracles and generators for the test suite.

The oracles here deliberately take different routes than the engine:
conditions are re-evaluated by compiling their source as a Python
expression, termination is recomputed from a full transitive closure,
merges are replayed as diff-then-apply.  They must stay independent of
the code paths they check.
"""
from __future__ import annotations

import random
from typing import Optional

from modulecanvas import conditions
from modulecanvas.conditions import And, Comparison, Completed, Not, Or
from modulecanvas.h5p import (
    H5pManifest,
    H5pPackage,
    LibraryDefinition,
    LibraryRef,
    SemanticsField,
)
from modulecanvas.model import CompositionGraph, FlowEdge, NodeInstance

# ---------------------------------------------------------------------------
# Condition truth oracle: the language is a subset of Python's boolean
# expression syntax once metric names are bound, so compiling the source
# with Python itself is an independent interpreter.

OUTCOME_GRID = [
    (score, attempts, duration, completed)
    for score in (0, 50, 80, 100)
    for attempts in (1, 4)
    for duration in (10, 120)
    for completed in (True, False)
]


def compile_condition_source(source: str):
    return compile(source.lower(), "<condition>", "eval")


def python_truth(code, score, attempts, duration, completed) -> bool:
    env = {
        "score": score,
        "attempts": attempts,
        "duration": duration,
        "completed": completed,
    }
    return bool(eval(code, {"__builtins__": {}}, env))


# ---------------------------------------------------------------------------
# Random condition trees (valid by construction).

_SCORE_LITERALS = (0, 25, 50, 79.5, 80, 99, 100)
_ATTEMPT_LITERALS = (1, 2, 3, 4, 10)
_DURATION_LITERALS = (0, 10, 59.5, 60, 120, 600)


def random_comparison(rng: random.Random) -> Comparison:
    metric = rng.choice(conditions.METRICS)
    op = rng.choice(conditions.OPERATORS)
    pool = {
        "score": _SCORE_LITERALS,
        "attempts": _ATTEMPT_LITERALS,
        "duration": _DURATION_LITERALS,
    }[metric]
    return Comparison(metric, op, rng.choice(pool))


def random_condition(rng: random.Random, max_depth: int = 6):
    if max_depth <= 1 or rng.random() < 0.4:
        return Completed() if rng.random() < 0.25 else random_comparison(rng)
    roll = rng.random()
    if roll < 0.2:
        return Not(random_condition(rng, max_depth - 1))
    kind = And if roll < 0.6 else Or
    width = rng.randint(2, 3)
    return kind(tuple(random_condition(rng, max_depth - 1) for _ in range(width)))


# ---------------------------------------------------------------------------
# Random composition graphs satisfying the structural invariants, plus the
# brute-force termination oracle.


def random_graph(rng: random.Random, max_nodes: int = 8, max_edges: int = 16,
                 composition_id: Optional[str] = None) -> CompositionGraph:
    n = rng.randint(1, max_nodes)
    node_ids = [f"n{i}" for i in range(n)]
    nodes = tuple(NodeInstance(nid, f"m{rng.randint(0, 2)}") for nid in node_ids)
    edges = []
    used = set()
    for _ in range(rng.randint(0, max_edges)):
        frm = rng.choice(node_ids)
        to = rng.choice(node_ids)
        priority = rng.randint(0, 5)
        if (frm, priority) in used:
            continue
        conditional = rng.random() < 0.5
        if not conditional and any(
            e.from_node == frm and e.condition is None for e in edges
        ):
            continue
        used.add((frm, priority))
        condition = conditions.parse(f"score >= {rng.choice((50, 80))}") if conditional else None
        edges.append(FlowEdge(frm, to, condition, priority))
    return CompositionGraph(
        composition_id or f"c{rng.randint(0, 10**9)}",
        node_ids[0],
        nodes,
        tuple(edges),
    )


def make_simple_package(
    machine_name: str = "TextPage",
    title: str = "Text page",
    content: Optional[dict] = None,
    version: tuple[int, int, int] = (1, 0, 0),
    assets: Optional[dict[str, bytes]] = None,
) -> H5pPackage:
    """A one-library package with permissive semantics, for fixtures."""
    library = LibraryDefinition(
        machine_name=machine_name,
        title=title,
        major_version=version[0],
        minor_version=version[1],
        patch_version=version[2],
        runnable=True,
        preloaded_scripts=(f"{machine_name}/main.js",),
        semantics=(
            SemanticsField(name="text", type="text", label="Text", optional=True),
            SemanticsField(
                name="passScore",
                type="number",
                label="Pass score",
                optional=True,
                minimum=0,
                maximum=100,
            ),
        ),
    )
    manifest = H5pManifest(
        title=title,
        language="en",
        main_library=machine_name,
        embed_types=("div",),
        preloaded_dependencies=(LibraryRef(machine_name, version[0], version[1]),),
        license="CC-BY-SA",
    )
    package_assets = {f"{machine_name}/main.js": b"// placeholder\n"}
    if assets:
        package_assets.update(assets)
    return H5pPackage(manifest, (library,), content or {}, package_assets)


# ---------------------------------------------------------------------------
# Three-way merge oracle: compute each side's diff against the base, then
# apply both (only meaningful when the sides touch disjoint subjects).


def graph_retitle(graph, node_id, label):
    from dataclasses import replace

    return replace(
        graph,
        nodes=tuple(
            replace(n, display_label=label) if n.node_id == node_id else n
            for n in graph.nodes
        ),
    )


def apply_disjoint_diffs(base, sides):
    base_nodes = {n.node_id: n for n in base.nodes}
    base_edges = {(e.from_node, e.to_node, e.priority): e for e in base.edges}
    nodes = dict(base_nodes)
    edges = dict(base_edges)
    start = base.start_node_id
    for side in sides:
        side_nodes = {n.node_id: n for n in side.nodes}
        side_edges = {(e.from_node, e.to_node, e.priority): e for e in side.edges}
        for nid, node in side_nodes.items():
            if node != base_nodes.get(nid):
                nodes[nid] = node
        for nid in base_nodes:
            if nid not in side_nodes:
                nodes.pop(nid, None)
        for key, edge in side_edges.items():
            if edge != base_edges.get(key):
                edges[key] = edge
        for key in base_edges:
            if key not in side_edges:
                edges.pop(key, None)
        if side.start_node_id != base.start_node_id:
            start = side.start_node_id
    return set(nodes.values()), set(edges.values()), start


def make_disjoint_sides(rng, base):
    """Random edits where each side only touches its own half of the graph."""
    from dataclasses import replace

    node_ids = [n.node_id for n in base.nodes]
    rng.shuffle(node_ids)
    half = len(node_ids) // 2
    territories = [set(node_ids[:half]), set(node_ids[half:])]
    sides = []
    for i, territory in enumerate(territories):
        side = base
        for nid in territory:
            roll = rng.random()
            if roll < 0.3:
                side = graph_retitle(side, nid, f"label-{i}-{nid}")
            elif roll < 0.5:
                side = replace(
                    side,
                    nodes=side.nodes + (NodeInstance(f"new-{i}-{nid}", "m9", None),),
                )
            elif roll < 0.7:
                priority = 50 + i  # never used by the base generator
                side = replace(
                    side,
                    edges=side.edges
                    + (
                        FlowEdge(
                            nid,
                            rng.choice(sorted(territory)),
                            conditions.parse("score > 1"),
                            priority,
                        ),
                    ),
                )
        sides.append(side)
    return sides


def closure_never_ends_subject(graph: CompositionGraph) -> set[str]:
    """Nodes reachable from start with no path to any terminal node,
    computed via a full boolean transitive closure (Floyd-Warshall)."""
    ids = [node.node_id for node in graph.nodes]
    index = {nid: i for i, nid in enumerate(ids)}
    n = len(ids)
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
    for edge in graph.edges:
        reach[index[edge.from_node]][index[edge.to_node]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    has_outgoing = {edge.from_node for edge in graph.edges}
    terminals = [index[nid] for nid in ids if nid not in has_outgoing]
    start = index[graph.start_node_id]
    subject = set()
    for i, nid in enumerate(ids):
        if not reach[start][i]:
            continue
        if not any(reach[i][t] for t in terminals):
            subject.add(nid)
    return subject
