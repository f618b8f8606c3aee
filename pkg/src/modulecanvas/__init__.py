"""modulecanvas: an engine and service for composing e-learning modules
on a graph canvas, with conditional flows, static validation, .h5p
import/export, a session runtime, spaced-repetition reviews, remix
lineage with rewards, and a community HTTP API."""

from .analysis import IssueCode, ValidationIssue, ValidationReport, validate
from .conditions import (
    And,
    Comparison,
    Completed,
    Condition,
    ConditionSyntaxError,
    Not,
    Or,
    ParseDiagnostic,
    evaluate,
    parse,
    unparse,
)
from .errors import CanvasError
from .h5p import (
    H5pManifest,
    H5pPackage,
    LibraryDefinition,
    LibraryRef,
    SemanticsField,
    export_composition,
    read_package,
    validate_content,
    write_package,
)
from .ledger import Badge, EventKind, Ledger, RewardEvent, RewardsSummary
from .merge import MergeConflict, MergeResult, UnrelatedHistories, merge
from .model import (
    CompositionGraph,
    FlowEdge,
    ModuleDescriptor,
    ModuleKind,
    ModuleRegistry,
    NodeInstance,
    OutcomeRecord,
    SessionState,
    SessionStatus,
    add_edge,
    add_node,
    graph_from_dict,
    graph_from_json,
    graph_to_dict,
    graph_to_json,
    new_composition,
)
from .runtime import aggregate_outcome, start_session, submit_outcome, trace_to_jsonl
from .scheduler import ReviewItem, due_items, review
from .service import CommunityService
from .store import KeyValueStore, VersionConflict

__version__ = "0.1.0"
