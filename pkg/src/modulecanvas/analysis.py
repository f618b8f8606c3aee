"""Static validation of compositions: integrity errors and continuity warnings.

The avatar surfaces these to authors.  Errors block export and sessions;
warnings are advisory.  "Never ends" is non-cotermination (a reachable
node from which no ending module can be reached), not mere cyclicity:
a loop with a conditional exit is legitimate repeat-until pedagogy.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import CompositionGraph, ModuleRegistry


class IssueCode(str, Enum):
    NEVER_ENDS = "NeverEnds"
    UNKNOWN_MODULE_REF = "UnknownModuleRef"
    NO_DEFAULT_EDGE = "NoDefaultEdge"
    UNREACHABLE_NODE = "UnreachableNode"
    REVISIT = "Revisit"


ERROR_CODES = frozenset(
    {IssueCode.NEVER_ENDS, IssueCode.UNKNOWN_MODULE_REF, IssueCode.NO_DEFAULT_EDGE}
)

# Localizable message templates; {nodes} is the comma-joined subject set.
MESSAGE_TEMPLATES = {
    IssueCode.NEVER_ENDS: "the composition never ends: {nodes} cannot reach an ending module",
    IssueCode.UNKNOWN_MODULE_REF: "node {nodes} refers to a module that does not exist",
    IssueCode.NO_DEFAULT_EDGE: "node {nodes} has conditions but no fallback arrow; a learner could get stuck",
    IssueCode.UNREACHABLE_NODE: "node {nodes} can never be reached from the start",
    IssueCode.REVISIT: "module at {nodes} may be visited more than once",
}


@dataclass(frozen=True)
class ValidationIssue:
    code: IssueCode
    subject: tuple[str, ...]
    message: str

    @classmethod
    def make(cls, code: IssueCode, subject: set[str] | tuple[str, ...]) -> "ValidationIssue":
        subject = tuple(sorted(subject))
        message = MESSAGE_TEMPLATES[code].format(nodes=", ".join(subject))
        return cls(code, subject, message)


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[ValidationIssue, ...]
    warnings: tuple[ValidationIssue, ...]

    @property
    def has_errors(self) -> bool:
        return bool(self.errors)

    def to_dict(self) -> dict:
        def issues(seq):
            return [
                {"code": issue.code.value, "subject": list(issue.subject), "message": issue.message}
                for issue in seq
            ]

        return {"errors": issues(self.errors), "warnings": issues(self.warnings)}


def _reachable_from(start: str, successors: dict[str, set[str]]) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        for nxt in successors.get(stack.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def validate(
    graph: CompositionGraph, registry: Optional[ModuleRegistry] = None
) -> ValidationReport:
    """Analyze a structurally valid graph; pure and deterministic.

    Without a registry, module resolution is skipped (standalone files).
    """
    node_ids = [node.node_id for node in graph.nodes]
    successors: dict[str, set[str]] = {nid: set() for nid in node_ids}
    predecessors: dict[str, set[str]] = {nid: set() for nid in node_ids}
    in_degree: dict[str, int] = {nid: 0 for nid in node_ids}
    for edge in graph.edges:
        successors[edge.from_node].add(edge.to_node)
        predecessors[edge.to_node].add(edge.from_node)
        in_degree[edge.to_node] += 1

    reachable = _reachable_from(graph.start_node_id, successors)
    terminals = [nid for nid in node_ids if not successors[nid]]

    # Nodes with a path to some terminal: reverse reachability from terminals.
    can_terminate: set[str] = set()
    stack = list(terminals)
    can_terminate.update(terminals)
    while stack:
        for prev in predecessors.get(stack.pop(), ()):
            if prev not in can_terminate:
                can_terminate.add(prev)
                stack.append(prev)

    errors: list[ValidationIssue] = []
    warnings: list[ValidationIssue] = []

    never_ends = {nid for nid in reachable if nid not in can_terminate}
    if never_ends:
        errors.append(ValidationIssue.make(IssueCode.NEVER_ENDS, never_ends))

    if registry is not None:
        for node in graph.nodes:
            if registry.resolve(node.module_ref) is None:
                errors.append(
                    ValidationIssue.make(IssueCode.UNKNOWN_MODULE_REF, {node.node_id})
                )

    for nid in node_ids:
        out = graph.outgoing(nid)
        if out and all(edge.condition is not None for edge in out):
            errors.append(ValidationIssue.make(IssueCode.NO_DEFAULT_EDGE, {nid}))

    for nid in node_ids:
        if nid not in reachable:
            warnings.append(ValidationIssue.make(IssueCode.UNREACHABLE_NODE, {nid}))

    for nid in node_ids:
        # on a directed cycle: some successor reaches back to the node
        on_cycle = any(
            nid in _reachable_from(succ, successors) for succ in successors[nid]
        )
        if in_degree[nid] >= 2 or on_cycle:
            warnings.append(ValidationIssue.make(IssueCode.REVISIT, {nid}))

    key = lambda issue: (issue.code.value, issue.subject)
    return ValidationReport(tuple(sorted(errors, key=key)), tuple(sorted(warnings, key=key)))
