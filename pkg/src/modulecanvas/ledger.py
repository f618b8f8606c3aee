"""Lineage, reuse/remix counting, reward points and badges.

Reuse is using someone else's module as-is; remix is deriving it and
changing it.  Classification therefore happens at the derivative's first
publish, not at derive time.  Points: acting is worth more than being
acted upon, and contributing an accepted improvement back is worth the
most.  Passive credit walks the whole ancestor chain, one point per
ancestor, but nobody earns anything from their own modules.  There are
no negative events: bad behaviour is prohibited, never punished.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Iterator, Optional

from .errors import CanvasError
from .merge import MergeResult, UnrelatedHistories, merge
from .model import (
    CompositionGraph,
    ModuleDescriptor,
    ModuleKind,
    ModuleRegistry,
    UnknownComposition,
    UnknownModule,
    fresh_id,
    graph_from_dict,
    graph_to_dict,
)


class EventKind(str, Enum):
    ACTIVE_REUSE = "ActiveReuse"
    ACTIVE_REMIX = "ActiveRemix"
    PASSIVE_REUSED = "PassiveReused"
    PASSIVE_REMIXED = "PassiveRemixed"
    MERGE_ACCEPTED = "MergeAccepted"


POINTS = {
    EventKind.ACTIVE_REMIX: 3,
    EventKind.ACTIVE_REUSE: 2,
    EventKind.MERGE_ACCEPTED: 5,
    EventKind.PASSIVE_REMIXED: 1,
    EventKind.PASSIVE_REUSED: 1,
}

BADGE_THRESHOLDS = (10, 50, 200)

BADGE_LABELS = {
    **{f"{n}-remixes": f"{n} remixes!" for n in BADGE_THRESHOLDS},
    **{f"remixed-{n}-modules": f"remixed {n} modules!" for n in BADGE_THRESHOLDS},
}


class NoPunishment(CanvasError):
    code = "NoPunishment"


@dataclass(frozen=True)
class RewardEvent:
    kind: EventKind
    points: int
    subject: str  # the module the event is about
    at: datetime

    def __post_init__(self):
        if self.points <= 0:
            raise NoPunishment("reward events carry strictly positive points")


@dataclass(frozen=True)
class Badge:
    badge_id: str
    awarded_at: datetime

    @property
    def label(self) -> str:
        return BADGE_LABELS.get(self.badge_id, self.badge_id)


@dataclass
class LineageRecord:
    module_id: str
    parent_id: Optional[str] = None
    fork_point_version: Optional[int] = None
    reuse_count: int = 0
    remix_count: int = 0


@dataclass(frozen=True)
class RewardsSummary:
    user_id: str
    total_points: int
    badges: tuple[Badge, ...]
    per_module: dict  # moduleId -> {"reuses": n, "remixes": n}


def _now() -> datetime:
    return datetime.now(timezone.utc)


class Ledger:
    """Event-sourced reward accounting over the module registry.

    Callers guarantee user existence (the service raises UnknownUser);
    the ledger owns lineage, publish state and point arithmetic.
    """

    def __init__(self, registry: ModuleRegistry):
        self.registry = registry
        self._lineage: dict[str, LineageRecord] = {}
        self._published: set[str] = set()
        self._modified_since_fork: set[str] = set()
        self._fork_snapshots: dict[str, CompositionGraph] = {}
        self._events: dict[str, list[RewardEvent]] = {}
        self._badges: dict[str, dict[str, Badge]] = {}

    # -- lineage -----------------------------------------------------------

    def register_module(self, descriptor: ModuleDescriptor, publish: bool = True) -> None:
        self._lineage.setdefault(
            descriptor.module_id,
            LineageRecord(descriptor.module_id, descriptor.parent_id),
        )
        if publish:
            self._published.add(descriptor.module_id)

    def lineage(self, module_id: str) -> LineageRecord:
        record = self._lineage.get(module_id)
        if record is None:
            raise UnknownModule(f"no module {module_id!r}")
        return record

    def is_published(self, module_id: str) -> bool:
        return module_id in self._published

    def _descriptor(self, module_id: str) -> ModuleDescriptor:
        descriptor = self.registry.resolve(module_id)
        if descriptor is None:
            raise UnknownModule(f"no module {module_id!r}")
        return descriptor

    def _ancestors(self, module_id: str) -> Iterator[ModuleDescriptor]:
        """The module itself, then its parent chain (acyclic by invariant)."""
        seen = set()
        current: Optional[str] = module_id
        while current is not None and current not in seen:
            seen.add(current)
            descriptor = self.registry.resolve(current)
            if descriptor is None:
                return
            yield descriptor
            current = descriptor.parent_id

    # -- events and badges ---------------------------------------------------

    def _emit(self, user_id: str, kind: EventKind, subject: str) -> None:
        event = RewardEvent(kind, POINTS[kind], subject, _now())
        self._events.setdefault(user_id, []).append(event)

    def _award_badge(self, user_id: str, badge_id: str) -> None:
        badges = self._badges.setdefault(user_id, {})
        if badge_id not in badges:  # at most once per (user, badge)
            badges[badge_id] = Badge(badge_id, _now())

    def _check_remix_badges(self, remixer: str, remixed_module: str) -> None:
        distinct = {
            event.subject
            for event in self._events.get(remixer, [])
            if event.kind is EventKind.ACTIVE_REMIX
        }
        for threshold in BADGE_THRESHOLDS:
            if len(distinct) >= threshold:
                self._award_badge(remixer, f"remixed-{threshold}-modules")
        record = self._lineage.get(remixed_module)
        if record is None:
            return
        author = self._descriptor(remixed_module).author_id
        for threshold in BADGE_THRESHOLDS:
            if record.remix_count >= threshold:
                self._award_badge(author, f"{threshold}-remixes")

    # -- operations ----------------------------------------------------------

    def derive(self, module_id: str, new_author: str) -> ModuleDescriptor:
        """Fork a published module: deep copy under a fresh identity.

        No reward events yet; they fire at the derivative's first publish
        once we know whether it was modified (remix) or not (reuse).
        """
        if module_id not in self._published:
            raise UnknownModule(f"no published module {module_id!r}")
        parent = self._descriptor(module_id)
        derived_id = fresh_id()
        if parent.kind is ModuleKind.COMPOSITE:
            parent_graph = self.registry.graph(parent.content_ref)
            fork_graph = replace(parent_graph, composition_id=fresh_id())
            self.registry.add_graph(fork_graph)
            content_ref = fork_graph.composition_id
            self._fork_snapshots[derived_id] = parent_graph
        else:
            content_ref = parent.content_ref
            package = self.registry.package_for(module_id)
            if package is not None:
                self.registry.add_package(derived_id, package)
        derived = ModuleDescriptor(
            module_id=derived_id,
            kind=parent.kind,
            title=parent.title,
            author_id=new_author,
            content_ref=content_ref,
            version=1,
            parent_id=module_id,
        )
        self.registry.add_module(derived)
        self._lineage[derived_id] = LineageRecord(
            derived_id, module_id, fork_point_version=parent.version
        )
        return derived

    def record_modification(self, module_id: str) -> None:
        if module_id in self._lineage and self._lineage[module_id].parent_id:
            self._modified_since_fork.add(module_id)

    def publish(self, module_id: str) -> None:
        """First publish of a derivative classifies it: modified since the
        fork counts as a remix of the parent, untouched counts as reuse."""
        if module_id in self._published:
            return
        descriptor = self._descriptor(module_id)
        self._published.add(module_id)
        record = self._lineage.setdefault(module_id, LineageRecord(module_id, descriptor.parent_id))
        parent_id = record.parent_id
        if parent_id is None:
            return
        parent = self.registry.resolve(parent_id)
        if parent is None or parent.author_id == descriptor.author_id:
            return  # self-derivation earns nothing and counts nothing
        modified = module_id in self._modified_since_fork
        parent_record = self._lineage.setdefault(parent_id, LineageRecord(parent_id, parent.parent_id))
        if modified:
            parent_record.remix_count += 1
            self._emit(descriptor.author_id, EventKind.ACTIVE_REMIX, parent_id)
            passive_kind = EventKind.PASSIVE_REMIXED
        else:
            parent_record.reuse_count += 1
            self._emit(descriptor.author_id, EventKind.ACTIVE_REUSE, parent_id)
            passive_kind = EventKind.PASSIVE_REUSED
        for ancestor in self._ancestors(parent_id):
            if ancestor.author_id != descriptor.author_id:
                self._emit(ancestor.author_id, passive_kind, ancestor.module_id)
        if modified:
            self._check_remix_badges(descriptor.author_id, parent_id)

    def record_reuse(self, module_id: str, composition_id: str, user_id: str) -> None:
        """Placing someone else's module, as-is, into a composition."""
        descriptor = self._descriptor(module_id)
        if self.registry.graph(composition_id) is None:
            raise UnknownComposition(f"no composition {composition_id!r}")
        if descriptor.author_id == user_id:
            return  # no self-dealing: counts unchanged, no events
        record = self._lineage.setdefault(
            module_id, LineageRecord(module_id, descriptor.parent_id)
        )
        record.reuse_count += 1
        self._emit(user_id, EventKind.ACTIVE_REUSE, module_id)
        for ancestor in self._ancestors(module_id):
            if ancestor.author_id != user_id:
                self._emit(ancestor.author_id, EventKind.PASSIVE_REUSED, ancestor.module_id)

    def merge_from_remix(self, original_id: str, remix_id: str) -> MergeResult:
        """Three-way merge of a remix back into its original against the
        fork-point snapshot; a clean merge bumps the original's version
        and rewards the remixer."""
        original = self._descriptor(original_id)
        remix = self._descriptor(remix_id)
        if (
            original.kind is not ModuleKind.COMPOSITE
            or remix.kind is not ModuleKind.COMPOSITE
        ):
            raise UnrelatedHistories("merging applies to compositions")
        if remix.parent_id != original_id:
            raise UnrelatedHistories(
                f"{remix_id!r} was not derived from {original_id!r}"
            )
        base = self._fork_snapshots.get(remix_id)
        if base is None:
            raise UnrelatedHistories("no fork-point snapshot for the remix")
        original_graph = self.registry.graph(original.content_ref)
        remix_graph = self.registry.graph(remix.content_ref)
        remix_graph = replace(remix_graph, composition_id=original.content_ref)
        base = replace(base, composition_id=original.content_ref)
        result = merge(original_graph, remix_graph, base)
        if result.clean:
            self.registry.add_graph(result.merged)
            self.registry.add_module(replace(original, version=original.version + 1))
            if remix.author_id != original.author_id:
                self._emit(remix.author_id, EventKind.MERGE_ACCEPTED, original_id)
        return result

    def rewards_summary(self, user_id: str) -> RewardsSummary:
        """Fold of the user's append-only event list; deterministic."""
        events = self._events.get(user_id, [])
        badges = tuple(
            sorted(self._badges.get(user_id, {}).values(), key=lambda b: b.badge_id)
        )
        per_module = {}
        for descriptor in self.registry.modules():
            if descriptor.author_id != user_id:
                continue
            record = self._lineage.get(descriptor.module_id)
            if record is not None:
                per_module[descriptor.module_id] = {
                    "reuses": record.reuse_count,
                    "remixes": record.remix_count,
                }
        return RewardsSummary(
            user_id=user_id,
            total_points=sum(event.points for event in events),
            badges=badges,
            per_module=per_module,
        )

    def events_for(self, user_id: str) -> tuple[RewardEvent, ...]:
        return tuple(self._events.get(user_id, []))

    # -- persistence ---------------------------------------------------------

    def snapshot_state(self) -> dict:
        return {
            "lineage": [
                {
                    "moduleId": r.module_id,
                    "parentId": r.parent_id,
                    "forkPointVersion": r.fork_point_version,
                    "reuseCount": r.reuse_count,
                    "remixCount": r.remix_count,
                }
                for r in self._lineage.values()
            ],
            "published": sorted(self._published),
            "modified": sorted(self._modified_since_fork),
            "forkSnapshots": {
                module_id: graph_to_dict(graph)
                for module_id, graph in self._fork_snapshots.items()
            },
            "events": {
                user: [
                    {
                        "kind": e.kind.value,
                        "points": e.points,
                        "subject": e.subject,
                        "at": e.at.isoformat(),
                    }
                    for e in events
                ]
                for user, events in self._events.items()
            },
            "badges": {
                user: [
                    {"badgeId": b.badge_id, "awardedAt": b.awarded_at.isoformat()}
                    for b in badges.values()
                ]
                for user, badges in self._badges.items()
            },
        }

    def restore_state(self, state: dict) -> None:
        self._lineage = {
            r["moduleId"]: LineageRecord(
                r["moduleId"],
                r.get("parentId"),
                r.get("forkPointVersion"),
                r.get("reuseCount", 0),
                r.get("remixCount", 0),
            )
            for r in state.get("lineage", [])
        }
        self._published = set(state.get("published", []))
        self._modified_since_fork = set(state.get("modified", []))
        self._fork_snapshots = {
            module_id: graph_from_dict(doc)
            for module_id, doc in state.get("forkSnapshots", {}).items()
        }
        self._events = {
            user: [
                RewardEvent(
                    EventKind(e["kind"]),
                    e["points"],
                    e["subject"],
                    datetime.fromisoformat(e["at"]),
                )
                for e in events
            ]
            for user, events in state.get("events", {}).items()
        }
        self._badges = {
            user: {
                b["badgeId"]: Badge(b["badgeId"], datetime.fromisoformat(b["awardedAt"]))
                for b in badges
            }
            for user, badges in state.get("badges", {}).items()
        }
