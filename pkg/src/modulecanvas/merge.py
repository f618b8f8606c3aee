"""Three-way structural merge of composition graphs.

Keyed by node id and by edge identity (from, to, priority); conflicts are
detected per attribute, not per line, because compositions are graphs,
not files.  A change present on exactly one side applies; identical
changes apply once; divergent changes on the same attribute become
conflicts and leave the merged value unresolved (the optional display
label is dropped, required attributes keep the base value).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

from .errors import CanvasError
from .model import CompositionGraph, FlowEdge, NodeInstance


class UnrelatedHistories(CanvasError):
    code = "UnrelatedHistories"


@dataclass(frozen=True)
class MergeConflict:
    kind: str  # "node" | "edge" | "graph"
    subject: str
    attribute: str
    original_value: Any
    remix_value: Any

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.kind, self.subject, self.attribute)


@dataclass(frozen=True)
class MergeResult:
    merged: CompositionGraph
    conflicts: tuple[MergeConflict, ...]

    @property
    def clean(self) -> bool:
        return not self.conflicts


def _edge_key(edge: FlowEdge) -> tuple[str, str, int]:
    return (edge.from_node, edge.to_node, edge.priority)


def _edge_subject(key: tuple[str, str, int]) -> str:
    return f"{key[0]}->{key[1]}#p{key[2]}"


def _merge_attribute(base, original, remix):
    """Returns (value, conflict: bool) under both-changed-differently."""
    if original == remix:
        return original, False
    if original == base:
        return remix, False
    if remix == base:
        return original, False
    return base, True


def merge(
    original: CompositionGraph,
    remix: CompositionGraph,
    base: CompositionGraph,
) -> MergeResult:
    conflicts: list[MergeConflict] = []

    base_nodes = {n.node_id: n for n in base.nodes}
    orig_nodes = {n.node_id: n for n in original.nodes}
    remix_nodes = {n.node_id: n for n in remix.nodes}

    merged_nodes: list[NodeInstance] = []

    def merge_present_node(nid: str) -> Optional[NodeInstance]:
        b, o, r = base_nodes.get(nid), orig_nodes.get(nid), remix_nodes.get(nid)
        if b is not None:
            if o is None and r is None:
                return None
            if o is None or r is None:
                survivor = o or r
                if survivor == b:  # clean delete on one side
                    return None
                conflicts.append(
                    MergeConflict("node", nid, "existence", o, r)
                )
                return survivor  # deleted on one side, changed on the other
        else:
            if o is not None and r is not None and o != r:
                label, label_conflict = _merge_attribute(None, o.display_label, r.display_label)
                ref = o.module_ref
                if o.module_ref != r.module_ref:
                    conflicts.append(
                        MergeConflict("node", nid, "moduleRef", o.module_ref, r.module_ref)
                    )
                if label_conflict:
                    conflicts.append(
                        MergeConflict("node", nid, "displayLabel", o.display_label, r.display_label)
                    )
                    label = None  # unresolved: excluded pending resolution
                return NodeInstance(nid, ref, label)
            return o or r
        # present everywhere: merge attribute by attribute
        ref, ref_conflict = _merge_attribute(b.module_ref, o.module_ref, r.module_ref)
        if ref_conflict:
            conflicts.append(
                MergeConflict("node", nid, "moduleRef", o.module_ref, r.module_ref)
            )
        label, label_conflict = _merge_attribute(b.display_label, o.display_label, r.display_label)
        if label_conflict:
            conflicts.append(
                MergeConflict("node", nid, "displayLabel", o.display_label, r.display_label)
            )
            label = None
        return NodeInstance(nid, ref, label)

    seen_nodes = set()
    for source in (base.nodes, original.nodes, remix.nodes):
        for node in source:
            if node.node_id in seen_nodes:
                continue
            seen_nodes.add(node.node_id)
            merged = merge_present_node(node.node_id)
            if merged is not None:
                merged_nodes.append(merged)

    base_edges = {_edge_key(e): e for e in base.edges}
    orig_edges = {_edge_key(e): e for e in original.edges}
    remix_edges = {_edge_key(e): e for e in remix.edges}

    merged_edges: list[FlowEdge] = []

    def merge_present_edge(key) -> Optional[FlowEdge]:
        b, o, r = base_edges.get(key), orig_edges.get(key), remix_edges.get(key)
        subject = _edge_subject(key)
        if b is not None:
            if o is None and r is None:
                return None
            if o is None or r is None:
                survivor = o or r
                if survivor == b:
                    return None
                conflicts.append(MergeConflict("edge", subject, "existence", o, r))
                return survivor
        else:
            if o is not None and r is not None and o != r:
                conflicts.append(
                    MergeConflict("edge", subject, "condition", o.condition, r.condition)
                )
                return None  # disputed addition stays out pending resolution
            return o or r
        condition, cond_conflict = _merge_attribute(b.condition, o.condition, r.condition)
        if cond_conflict:
            conflicts.append(
                MergeConflict("edge", subject, "condition", o.condition, r.condition)
            )
        return FlowEdge(key[0], key[1], condition, key[2])

    seen_edges = set()
    for source in (base.edges, original.edges, remix.edges):
        for edge in source:
            key = _edge_key(edge)
            if key in seen_edges:
                continue
            seen_edges.add(key)
            merged = merge_present_edge(key)
            if merged is not None:
                merged_edges.append(merged)

    start, start_conflict = _merge_attribute(
        base.start_node_id, original.start_node_id, remix.start_node_id
    )
    if start_conflict:
        conflicts.append(
            MergeConflict(
                "graph", "startNodeId", "startNodeId",
                original.start_node_id, remix.start_node_id,
            )
        )

    # Repairs: the assembled parts must still form a structurally valid
    # graph.  Anything dropped here is a cross-side collision.
    node_ids = {n.node_id for n in merged_nodes}
    if start not in node_ids:
        restored = base_nodes.get(start) or orig_nodes.get(start) or remix_nodes.get(start)
        conflicts.append(MergeConflict("node", start, "existence", None, None))
        merged_nodes.append(restored)
        node_ids.add(start)

    slots: dict[tuple[str, int], list[FlowEdge]] = {}
    for edge in merged_edges:
        slots.setdefault((edge.from_node, edge.priority), []).append(edge)

    kept_edges: list[FlowEdge] = []
    conflicted_slots: set[tuple[str, int]] = set()
    for edge in merged_edges:
        subject = _edge_subject(_edge_key(edge))
        slot = (edge.from_node, edge.priority)
        if len(slots[slot]) > 1:
            # cross-side collision: both contenders stay out pending resolution
            if slot not in conflicted_slots:
                conflicted_slots.add(slot)
                contenders = slots[slot]
                conflicts.append(
                    MergeConflict(
                        "edge", f"{slot[0]}#p{slot[1]}", "priority",
                        contenders[0], contenders[1],
                    )
                )
            continue
        if edge.from_node not in node_ids or edge.to_node not in node_ids:
            conflicts.append(MergeConflict("edge", subject, "existence", edge, None))
            continue
        kept_edges.append(edge)

    defaults_at: dict[str, list[FlowEdge]] = {}
    for edge in kept_edges:
        if edge.condition is None:
            defaults_at.setdefault(edge.from_node, []).append(edge)
    doubled = {nid for nid, edges in defaults_at.items() if len(edges) > 1}
    if doubled:
        for nid in sorted(doubled):
            conflicts.append(
                MergeConflict(
                    "node", nid, "defaultEdge",
                    defaults_at[nid][0], defaults_at[nid][1],
                )
            )
        kept_edges = [
            e
            for e in kept_edges
            if not (e.condition is None and e.from_node in doubled)
        ]

    merged_graph = CompositionGraph(
        original.composition_id, start, tuple(merged_nodes), tuple(kept_edges)
    )
    return MergeResult(merged_graph, tuple(conflicts))
