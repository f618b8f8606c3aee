"""Core domain types: modules, composition graphs, outcomes, sessions.

Everything here is a plain value.  Graph edits produce new graph values;
structural invariants (unique node ids, resolvable edge endpoints, one
default edge and distinct priorities per node) are enforced when a graph
is constructed, so an invalid graph cannot exist.
"""
from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Optional

from . import conditions
from .conditions import Condition
from .errors import CanvasError

CONTENT_LICENCE = "CC-BY-SA"

# Reserved module id of the synthetic entry node every new composition
# starts with; resolvable in every registry, never exported as content.
START_MODULE_REF = "builtin:start"


class ModuleKind(str, Enum):
    ATOMIC = "atomic"
    COMPOSITE = "composite"


class AssessmentKind(str, Enum):
    READING = "reading"
    MULTIPLE_CHOICE = "multipleChoice"
    GENERATION = "generation"


class SessionStatus(str, Enum):
    ACTIVE = "active"
    FINISHED = "finished"
    STUCK = "stuck"


class EmptyTitle(CanvasError):
    code = "EmptyTitle"


class UnknownNode(CanvasError):
    code = "UnknownNode"


class DuplicateDefault(CanvasError):
    code = "DuplicateDefault"


class DuplicatePriority(CanvasError):
    code = "DuplicatePriority"


class CyclicComposition(CanvasError):
    code = "CyclicComposition"


class UnknownModule(CanvasError):
    code = "UnknownModule"


class UnknownComposition(CanvasError):
    code = "UnknownComposition"


class InvalidRecord(CanvasError):
    code = "InvalidRecord"


def fresh_id() -> str:
    return uuid.uuid4().hex


@dataclass(frozen=True)
class ModuleDescriptor:
    """A shareable unit: atomic H5P content or a composition."""

    module_id: str
    kind: ModuleKind
    title: str
    author_id: str
    content_ref: str
    licence: str = CONTENT_LICENCE
    version: int = 1
    parent_id: Optional[str] = None

    def __post_init__(self):
        if not self.title.strip():
            raise EmptyTitle("module title must not be empty")
        if self.licence != CONTENT_LICENCE:
            raise InvalidRecord(
                f"modules always carry the {CONTENT_LICENCE} content licence"
            )
        if self.version < 1:
            raise InvalidRecord("version starts at 1")


@dataclass(frozen=True)
class NodeInstance:
    node_id: str
    module_ref: str
    display_label: Optional[str] = None


@dataclass(frozen=True)
class FlowEdge:
    """A flow arrow; condition None marks the default (else) edge."""

    from_node: str
    to_node: str
    condition: Optional[Condition]
    priority: int

    def __post_init__(self):
        if self.priority < 0:
            raise InvalidRecord("edge priority must be >= 0")
        if self.condition is not None:
            conditions.validate(self.condition)


@dataclass(frozen=True)
class CompositionGraph:
    """The canvas document: module nodes plus conditional flow edges."""

    composition_id: str
    start_node_id: str
    nodes: tuple[NodeInstance, ...]
    edges: tuple[FlowEdge, ...]

    def __post_init__(self):
        seen = set()
        for node in self.nodes:
            if node.node_id in seen:
                raise InvalidRecord(f"duplicate node id {node.node_id!r}")
            seen.add(node.node_id)
        if self.start_node_id not in seen:
            raise UnknownNode(f"start node {self.start_node_id!r} not in graph")
        defaults: set[str] = set()
        priorities: set[tuple[str, int]] = set()
        for edge in self.edges:
            for endpoint in (edge.from_node, edge.to_node):
                if endpoint not in seen:
                    raise UnknownNode(f"edge endpoint {endpoint!r} not in graph")
            if edge.condition is None:
                if edge.from_node in defaults:
                    raise DuplicateDefault(
                        f"node {edge.from_node!r} already has a default edge"
                    )
                defaults.add(edge.from_node)
            key = (edge.from_node, edge.priority)
            if key in priorities:
                raise DuplicatePriority(
                    f"priority {edge.priority} already used at {edge.from_node!r}"
                )
            priorities.add(key)

    def node(self, node_id: str) -> NodeInstance:
        for node in self.nodes:
            if node.node_id == node_id:
                return node
        raise UnknownNode(f"no node {node_id!r}")

    def has_node(self, node_id: str) -> bool:
        return any(node.node_id == node_id for node in self.nodes)

    def outgoing(self, node_id: str) -> tuple[FlowEdge, ...]:
        """Outgoing edges in ascending priority order."""
        return tuple(
            sorted(
                (e for e in self.edges if e.from_node == node_id),
                key=lambda e: e.priority,
            )
        )


@dataclass(frozen=True)
class OutcomeRecord:
    """What one learner did at one node."""

    node_id: str
    score_percent: float
    completed: bool = False
    attempts: int = 1
    duration_seconds: float = 0.0
    assessment_kind: AssessmentKind = AssessmentKind.READING
    recorded_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc)
    )

    def __post_init__(self):
        if not 0 <= self.score_percent <= 100:
            raise InvalidRecord("scorePercent must lie in [0, 100]")
        if self.attempts < 1:
            raise InvalidRecord("attempts must be >= 1")
        if self.duration_seconds < 0:
            raise InvalidRecord("durationSeconds must be >= 0")


@dataclass(frozen=True)
class SessionState:
    session_id: str
    composition_id: str
    current_node: str
    trace: tuple[tuple[str, OutcomeRecord], ...] = ()
    status: SessionStatus = SessionStatus.ACTIVE


class ModuleRegistry:
    """In-memory module resolver shared by validation, export and runtime.

    Holds descriptors, the graphs behind composite modules, and the H5P
    packages behind atomic ones.
    """

    def __init__(self):
        self._modules: dict[str, ModuleDescriptor] = {}
        self._graphs: dict[str, CompositionGraph] = {}
        self._packages: dict[str, object] = {}
        self._modules[START_MODULE_REF] = ModuleDescriptor(
            module_id=START_MODULE_REF,
            kind=ModuleKind.ATOMIC,
            title="Start",
            author_id="system",
            content_ref=START_MODULE_REF,
        )

    def add_module(self, descriptor: ModuleDescriptor) -> None:
        self._modules[descriptor.module_id] = descriptor

    def add_graph(self, graph: CompositionGraph) -> None:
        self._graphs[graph.composition_id] = graph

    def add_package(self, module_id: str, package: object) -> None:
        self._packages[module_id] = package

    def resolve(self, module_id: str) -> Optional[ModuleDescriptor]:
        return self._modules.get(module_id)

    def graph(self, composition_id: str) -> Optional[CompositionGraph]:
        return self._graphs.get(composition_id)

    def graph_for_module(self, module_id: str) -> Optional[CompositionGraph]:
        descriptor = self._modules.get(module_id)
        if descriptor is None or descriptor.kind is not ModuleKind.COMPOSITE:
            return None
        return self._graphs.get(descriptor.content_ref)

    def module_for_composition(self, composition_id: str) -> Optional[ModuleDescriptor]:
        for descriptor in self._modules.values():
            if (
                descriptor.kind is ModuleKind.COMPOSITE
                and descriptor.content_ref == composition_id
            ):
                return descriptor
        return None

    def package_for(self, module_id: str):
        return self._packages.get(module_id)

    def modules(self) -> list[ModuleDescriptor]:
        return [
            m for m in self._modules.values() if m.module_id != START_MODULE_REF
        ]


def new_composition(title: str, author_id: str) -> tuple[ModuleDescriptor, CompositionGraph]:
    """A fresh composite module (version 1) plus its one-node graph."""
    if not title.strip():
        raise EmptyTitle("composition title must not be empty")
    composition_id = fresh_id()
    start = NodeInstance(fresh_id(), START_MODULE_REF, "Start")
    graph = CompositionGraph(composition_id, start.node_id, (start,), ())
    descriptor = ModuleDescriptor(
        module_id=fresh_id(),
        kind=ModuleKind.COMPOSITE,
        title=title,
        author_id=author_id,
        content_ref=composition_id,
    )
    return descriptor, graph


def _contains_composition(
    module_ref: str, composition_id: str, registry: ModuleRegistry
) -> bool:
    """Would placing module_ref inside composition_id close a containment
    loop?  Walks node -> composite module -> its graph, breadth-first."""
    queue = [module_ref]
    visited = set()
    while queue:
        current = queue.pop()
        if current in visited:
            continue
        visited.add(current)
        descriptor = registry.resolve(current)
        if descriptor is None or descriptor.kind is not ModuleKind.COMPOSITE:
            continue
        if descriptor.content_ref == composition_id:
            return True
        graph = registry.graph(descriptor.content_ref)
        if graph is None:
            continue
        queue.extend(node.module_ref for node in graph.nodes)
    return False


def add_node(
    graph: CompositionGraph,
    module_ref: str,
    registry: Optional[ModuleRegistry] = None,
    display_label: Optional[str] = None,
) -> CompositionGraph:
    """New graph with one fresh node appended; prior content untouched.

    With a registry, refuses module refs whose composition transitively
    contains this graph (CyclicComposition).
    """
    if registry is not None and _contains_composition(
        module_ref, graph.composition_id, registry
    ):
        raise CyclicComposition(
            f"module {module_ref!r} transitively contains this composition"
        )
    node = NodeInstance(fresh_id(), module_ref, display_label)
    return replace(graph, nodes=graph.nodes + (node,))


def add_edge(
    graph: CompositionGraph,
    from_node: str,
    to_node: str,
    condition: Optional[Condition],
    priority: int,
) -> CompositionGraph:
    """New graph with the edge appended; FlowEdge invariants re-checked."""
    for endpoint in (from_node, to_node):
        if not graph.has_node(endpoint):
            raise UnknownNode(f"no node {endpoint!r}")
    edge = FlowEdge(from_node, to_node, condition, priority)
    return replace(graph, edges=graph.edges + (edge,))


# ---------------------------------------------------------------------------
# Canonical JSON document for a graph (the wire and export format).


def graph_to_dict(graph: CompositionGraph) -> dict:
    return {
        "compositionId": graph.composition_id,
        "startNodeId": graph.start_node_id,
        "nodes": [
            {
                "nodeId": node.node_id,
                "moduleRef": node.module_ref,
                "displayLabel": node.display_label,
            }
            for node in sorted(graph.nodes, key=lambda n: n.node_id)
        ],
        "edges": [
            {
                "from": edge.from_node,
                "to": edge.to_node,
                "condition": None
                if edge.condition is None
                else conditions.unparse(edge.condition),
                "priority": edge.priority,
            }
            for edge in sorted(graph.edges, key=lambda e: (e.from_node, e.priority))
        ],
    }


def graph_to_json(graph: CompositionGraph) -> str:
    return json.dumps(graph_to_dict(graph), sort_keys=True, indent=2) + "\n"


def graph_from_dict(document: dict) -> CompositionGraph:
    nodes = tuple(
        NodeInstance(n["nodeId"], n["moduleRef"], n.get("displayLabel"))
        for n in document["nodes"]
    )
    edges = tuple(
        FlowEdge(
            e["from"],
            e["to"],
            None if e.get("condition") is None else conditions.parse(e["condition"]),
            e["priority"],
        )
        for e in document["edges"]
    )
    return CompositionGraph(
        document["compositionId"], document["startNodeId"], nodes, edges
    )


def graph_from_json(text: str) -> CompositionGraph:
    return graph_from_dict(json.loads(text))
