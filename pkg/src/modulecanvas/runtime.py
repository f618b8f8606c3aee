"""Session runtime: walks one learner through a validated composition.

Deterministic first-match semantics: a node's outgoing edges are tried
in ascending priority and the first edge whose condition holds (a
default edge always holds) picks the next node.  On an error-free
composition a session can never get stuck; the analyzer's NoDefaultEdge
error guarantees it.
"""
from __future__ import annotations

import json
from dataclasses import replace

from . import analysis, conditions
from .errors import CanvasError
from .model import (
    AssessmentKind,
    ModuleRegistry,
    OutcomeRecord,
    SessionState,
    SessionStatus,
    UnknownComposition,
    fresh_id,
)


class ValidationErrorsPresent(CanvasError):
    code = "ValidationErrorsPresent"

    def __init__(self, report):
        super().__init__("composition does not validate; fix the errors first")
        self.report = report


class SessionNotActive(CanvasError):
    code = "SessionNotActive"


class WrongNode(CanvasError):
    code = "WrongNode"


class SessionNotFinished(CanvasError):
    code = "SessionNotFinished"


def start_session(
    registry: ModuleRegistry, composition_id: str, user_id: str
) -> SessionState:
    """A fresh active session at the composition's start node."""
    del user_id  # sessions are value states; ownership lives in the service
    graph = registry.graph(composition_id)
    if graph is None:
        raise UnknownComposition(f"no composition {composition_id!r}")
    report = analysis.validate(graph, registry)
    if report.has_errors:
        raise ValidationErrorsPresent(report)
    return SessionState(
        session_id=fresh_id(),
        composition_id=composition_id,
        current_node=graph.start_node_id,
        trace=(),
        status=SessionStatus.ACTIVE,
    )


def submit_outcome(
    registry: ModuleRegistry, session: SessionState, outcome: OutcomeRecord
) -> SessionState:
    """Record the outcome at the current node and advance along the first
    matching edge; finishes at terminal nodes."""
    if session.status is not SessionStatus.ACTIVE:
        raise SessionNotActive(f"session is {session.status.value}")
    if outcome.node_id != session.current_node:
        raise WrongNode(
            f"outcome is for {outcome.node_id!r} but the session is at "
            f"{session.current_node!r}"
        )
    graph = registry.graph(session.composition_id)
    if graph is None:
        raise UnknownComposition(f"no composition {session.composition_id!r}")
    trace = session.trace + ((session.current_node, outcome),)
    out_edges = graph.outgoing(session.current_node)
    if not out_edges:
        return replace(session, trace=trace, status=SessionStatus.FINISHED)
    for edge in out_edges:  # already in ascending priority
        if edge.condition is None or conditions.evaluate(edge.condition, outcome):
            return replace(session, trace=trace, current_node=edge.to_node)
    # reachable only when validation was bypassed (no default edge fired)
    return replace(session, trace=trace, status=SessionStatus.STUCK)


def aggregate_outcome(session: SessionState, node_id: str | None = None) -> OutcomeRecord:
    """The composite's outcome for a parent session: mean score over the
    trace, total duration, completed."""
    if session.status is not SessionStatus.FINISHED:
        raise SessionNotFinished(f"session is {session.status.value}")
    scores = [outcome.score_percent for _, outcome in session.trace]
    duration = sum(outcome.duration_seconds for _, outcome in session.trace)
    return OutcomeRecord(
        node_id=node_id if node_id is not None else session.composition_id,
        score_percent=sum(scores) / len(scores),
        completed=True,
        attempts=1,
        duration_seconds=duration,
        assessment_kind=AssessmentKind.READING,
    )


def trace_to_jsonl(session: SessionState) -> str:
    """One outcome per line, for analytics ingestion."""
    lines = []
    for node_id, outcome in session.trace:
        lines.append(
            json.dumps(
                {
                    "nodeId": node_id,
                    "scorePercent": outcome.score_percent,
                    "completed": outcome.completed,
                    "attempts": outcome.attempts,
                    "durationSeconds": outcome.duration_seconds,
                    "assessmentKind": outcome.assessment_kind.value,
                    "recordedAt": outcome.recorded_at.isoformat(),
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")
