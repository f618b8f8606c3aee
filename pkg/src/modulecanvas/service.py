"""The community service: accounts, avatars, likes, favourites, search,
chat, plus the wiring of compositions, sessions, reviews and rewards
over the embedded store.

Write paths are serialized per resource through the store's single
writer; composition updates carry the version they expect (optimistic
concurrency).  All domain rules live in the engine modules; this layer
owns identity, visibility and persistence.
"""
from __future__ import annotations

import base64
import hashlib
import os
import threading
from dataclasses import dataclass, replace
from datetime import date, datetime
from typing import Optional

from . import analysis, h5p, runtime, scheduler
from .chat import ChatCatalog, ChatMessage, UnresolvedSlot
from .config import ServiceConfig
from .errors import CanvasError
from .ledger import Ledger
from .merge import MergeResult
from .model import (
    AssessmentKind,
    CompositionGraph,
    ModuleDescriptor,
    ModuleKind,
    ModuleRegistry,
    OutcomeRecord,
    SessionState,
    SessionStatus,
    UnknownComposition,
    UnknownModule,
    fresh_id,
    graph_from_dict,
    graph_to_dict,
    new_composition,
)
from .scheduler import ReviewItem
from .store import KeyValueStore, VersionConflict

AVATAR_SPECIES = "otter"  # the project mascot; fixed for every avatar


class LogonIdTaken(CanvasError):
    code = "LogonIdTaken"


class WeakPassword(CanvasError):
    code = "WeakPassword"


class InvalidCredentials(CanvasError):
    code = "InvalidCredentials"


class UnknownUser(CanvasError):
    code = "UnknownUser"


class UnknownTarget(CanvasError):
    code = "UnknownTarget"


class UnknownRun(CanvasError):
    code = "UnknownRun"


class UnknownReviewItem(CanvasError):
    code = "UnknownReviewItem"


class InvalidAvatarName(CanvasError):
    code = "InvalidAvatarName"


@dataclass
class Avatar:
    name: str
    species: str = AVATAR_SPECIES
    customization: Optional[dict] = None

    def __post_init__(self):
        if self.customization is None:
            self.customization = {}
        if not 1 <= len(self.name) <= 32:
            raise InvalidAvatarName("avatar names are 1..32 characters")
        self.species = AVATAR_SPECIES  # species is not customizable

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "species": self.species,
            "customization": dict(self.customization),
        }


@dataclass
class UserAccount:
    user_id: str
    logon_id: str
    password_hash: str
    email: Optional[str]
    avatar: Avatar

    def to_dict(self) -> dict:
        return {
            "userId": self.user_id,
            "logonId": self.logon_id,
            "passwordHash": self.password_hash,
            "email": self.email,
            "avatar": self.avatar.to_dict(),
        }


@dataclass(frozen=True)
class RegistrationResult:
    account: UserAccount
    avatar_name_notice: Optional[str]


def _hash_password(password: str, config: ServiceConfig, salt: Optional[bytes] = None) -> str:
    salt = salt or os.urandom(16)
    digest = hashlib.scrypt(
        password.encode("utf-8"),
        salt=salt,
        n=config.scrypt_n,
        r=config.scrypt_r,
        p=config.scrypt_p,
    )
    return "scrypt${}${}${}${}${}".format(
        config.scrypt_n,
        config.scrypt_r,
        config.scrypt_p,
        base64.b64encode(salt).decode("ascii"),
        base64.b64encode(digest).decode("ascii"),
    )


def _verify_password(password: str, stored: str) -> bool:
    try:
        _, n, r, p, salt_b64, digest_b64 = stored.split("$")
        digest = hashlib.scrypt(
            password.encode("utf-8"),
            salt=base64.b64decode(salt_b64),
            n=int(n),
            r=int(r),
            p=int(p),
        )
        return base64.b64decode(digest_b64) == digest
    except (ValueError, TypeError):
        return False


def _descriptor_to_dict(descriptor: ModuleDescriptor) -> dict:
    return {
        "moduleId": descriptor.module_id,
        "kind": descriptor.kind.value,
        "title": descriptor.title,
        "authorId": descriptor.author_id,
        "contentRef": descriptor.content_ref,
        "licence": descriptor.licence,
        "version": descriptor.version,
        "parentId": descriptor.parent_id,
    }


def _descriptor_from_dict(data: dict) -> ModuleDescriptor:
    return ModuleDescriptor(
        module_id=data["moduleId"],
        kind=ModuleKind(data["kind"]),
        title=data["title"],
        author_id=data["authorId"],
        content_ref=data["contentRef"],
        licence=data["licence"],
        version=data["version"],
        parent_id=data.get("parentId"),
    )


def _session_to_dict(session: SessionState, user_id: str) -> dict:
    return {
        "sessionId": session.session_id,
        "compositionId": session.composition_id,
        "currentNode": session.current_node,
        "status": session.status.value,
        "userId": user_id,
        "trace": [
            {
                "nodeId": node_id,
                "scorePercent": outcome.score_percent,
                "completed": outcome.completed,
                "attempts": outcome.attempts,
                "durationSeconds": outcome.duration_seconds,
                "assessmentKind": outcome.assessment_kind.value,
                "recordedAt": outcome.recorded_at.isoformat(),
            }
            for node_id, outcome in session.trace
        ],
    }


def _session_from_dict(data: dict) -> SessionState:
    return SessionState(
        session_id=data["sessionId"],
        composition_id=data["compositionId"],
        current_node=data["currentNode"],
        status=SessionStatus(data["status"]),
        trace=tuple(
            (
                entry["nodeId"],
                OutcomeRecord(
                    node_id=entry["nodeId"],
                    score_percent=entry["scorePercent"],
                    completed=entry["completed"],
                    attempts=entry["attempts"],
                    duration_seconds=entry["durationSeconds"],
                    assessment_kind=AssessmentKind(entry["assessmentKind"]),
                    recorded_at=datetime.fromisoformat(entry["recordedAt"]),
                ),
            )
            for entry in data["trace"]
        ),
    )


def _review_to_dict(item: ReviewItem, user_id: str) -> dict:
    return {
        "itemId": item.item_id,
        "moduleRef": item.module_ref,
        "easiness": item.easiness,
        "repetitions": item.repetitions,
        "intervalDays": item.interval_days,
        "dueDate": item.due_date.isoformat(),
        "userId": user_id,
    }


def _review_from_dict(data: dict) -> ReviewItem:
    return ReviewItem(
        item_id=data["itemId"],
        module_ref=data["moduleRef"],
        easiness=data["easiness"],
        repetitions=data["repetitions"],
        interval_days=data["intervalDays"],
        due_date=date.fromisoformat(data["dueDate"]),
    )


class CommunityService:
    def __init__(
        self,
        config: Optional[ServiceConfig] = None,
        store: Optional[KeyValueStore] = None,
    ):
        self.config = config or ServiceConfig()
        self.store = store or KeyValueStore(self.config.store_path)
        self.registry = ModuleRegistry()
        self.ledger = Ledger(self.registry)
        self.catalog = (
            ChatCatalog.from_file(self.config.chat_catalog_path)
            if self.config.chat_catalog_path
            else ChatCatalog.default()
        )
        self._write_lock = threading.RLock()
        self._accounts: dict[str, UserAccount] = {}  # userId -> account
        self._logons: dict[str, str] = {}  # logonId -> userId
        self._tokens: dict[str, str] = {}  # token -> userId
        self._likes: dict[str, set[str]] = {}  # moduleId -> userIds
        self._favourites: dict[str, set[tuple[str, str]]] = {}  # userId -> (kind, id)
        self._sessions: dict[str, tuple[SessionState, str]] = {}  # id -> (state, userId)
        self._reviews: dict[str, tuple[ReviewItem, str]] = {}  # itemId -> (item, userId)
        self._messages: dict[str, list[ChatMessage]] = {}  # toUser -> messages
        self._load()

    # -- persistence -----------------------------------------------------------

    def _load(self) -> None:
        for key, data in self.store.items("users"):
            account = UserAccount(
                user_id=data["userId"],
                logon_id=data["logonId"],
                password_hash=data["passwordHash"],
                email=data.get("email"),
                avatar=Avatar(
                    name=data["avatar"]["name"],
                    customization=data["avatar"].get("customization", {}),
                ),
            )
            self._accounts[key] = account
            self._logons[account.logon_id] = key
        for key, data in self.store.items("modules"):
            self.registry.add_module(_descriptor_from_dict(data))
        for key, data in self.store.items("graphs"):
            self.registry.add_graph(graph_from_dict(data))
        for key, data in self.store.items("packages"):
            self.registry.add_package(
                key, h5p.read_package(base64.b64decode(data["bytes"]))
            )
        ledger_state = self.store.get("ledger", "state")
        if ledger_state is not None:
            self.ledger.restore_state(ledger_state)
        for key, data in self.store.items("likes"):
            self._likes[key] = set(data["users"])
        for key, data in self.store.items("favourites"):
            self._favourites[key] = {(f["kind"], f["id"]) for f in data["entries"]}
        for key, data in self.store.items("runs"):
            self._sessions[key] = (_session_from_dict(data), data["userId"])
        for key, data in self.store.items("reviews"):
            self._reviews[key] = (_review_from_dict(data), data["userId"])
        for key, data in self.store.items("chat"):
            self._messages[key] = [
                ChatMessage(
                    message_id=m["messageId"],
                    from_user=m["fromUser"],
                    to_user=m["toUser"],
                    template_id=m["templateId"],
                    slots=tuple((s["slot"], s["moduleId"]) for s in m["slots"]),
                    sent_at=datetime.fromisoformat(m["sentAt"]),
                )
                for m in data["messages"]
            ]

    def _persist_account(self, account: UserAccount) -> None:
        self.store.put("users", account.user_id, account.to_dict())

    def _persist_module(self, descriptor: ModuleDescriptor) -> None:
        self.store.put("modules", descriptor.module_id, _descriptor_to_dict(descriptor))

    def _persist_graph(self, graph: CompositionGraph) -> None:
        self.store.put("graphs", graph.composition_id, graph_to_dict(graph))

    def _persist_package(self, module_id: str, data: bytes) -> None:
        self.store.put(
            "packages", module_id, {"bytes": base64.b64encode(data).decode("ascii")}
        )

    def _persist_ledger(self) -> None:
        self.store.put("ledger", "state", self.ledger.snapshot_state())

    def _persist_likes(self, module_id: str) -> None:
        self.store.put(
            "likes", module_id, {"users": sorted(self._likes.get(module_id, set()))}
        )

    def _persist_favourites(self, user_id: str) -> None:
        self.store.put(
            "favourites",
            user_id,
            {
                "entries": [
                    {"kind": kind, "id": target}
                    for kind, target in sorted(self._favourites.get(user_id, set()))
                ]
            },
        )

    def _persist_session(self, session: SessionState, user_id: str) -> None:
        self.store.put("runs", session.session_id, _session_to_dict(session, user_id))

    def _persist_review(self, item: ReviewItem, user_id: str) -> None:
        self.store.put("reviews", item.item_id, _review_to_dict(item, user_id))

    def _persist_inbox(self, user_id: str) -> None:
        self.store.put(
            "chat",
            user_id,
            {
                "messages": [
                    {
                        "messageId": m.message_id,
                        "fromUser": m.from_user,
                        "toUser": m.to_user,
                        "templateId": m.template_id,
                        "slots": [
                            {"slot": slot, "moduleId": module_id}
                            for slot, module_id in m.slots
                        ],
                        "sentAt": m.sent_at.isoformat(),
                    }
                    for m in self._messages.get(user_id, [])
                ]
            },
        )

    # -- accounts ---------------------------------------------------------------

    def register(
        self,
        logon_id: str,
        password: str,
        email: Optional[str] = None,
        avatar_name: Optional[str] = None,
    ) -> RegistrationResult:
        if len(password) < 8:
            raise WeakPassword("passwords need at least 8 characters")
        name = avatar_name or logon_id
        with self._write_lock:
            if logon_id in self._logons:
                raise LogonIdTaken(f"logon id {logon_id!r} is taken")
            duplicate = any(
                account.avatar.name == name for account in self._accounts.values()
            )
            account = UserAccount(
                user_id=fresh_id(),
                logon_id=logon_id,
                password_hash=_hash_password(password, self.config),
                email=email,
                avatar=Avatar(name=name),
            )
            self._accounts[account.user_id] = account
            self._logons[logon_id] = account.user_id
            self._persist_account(account)
        notice = (
            f"the avatar name {name!r} is already in use; names may repeat"
            if duplicate
            else None
        )
        return RegistrationResult(account, notice)

    def login(self, logon_id: str, password: str) -> dict:
        user_id = self._logons.get(logon_id)
        if user_id is None or not _verify_password(
            password, self._accounts[user_id].password_hash
        ):
            raise InvalidCredentials("logon id and password do not match")
        token = fresh_id()
        self._tokens[token] = user_id
        return {"userId": user_id, "token": token}

    def require_user(self, user_id: str) -> UserAccount:
        account = self._accounts.get(user_id)
        if account is None:
            raise UnknownUser(f"no user {user_id!r}")
        return account

    def user_id_for_logon(self, logon_id: str) -> Optional[str]:
        return self._logons.get(logon_id)

    # -- modules and compositions -------------------------------------------------

    def require_module(self, module_id: str) -> ModuleDescriptor:
        descriptor = self.registry.resolve(module_id)
        if descriptor is None:
            raise UnknownModule(f"no module {module_id!r}")
        return descriptor

    def require_graph(self, composition_id: str) -> CompositionGraph:
        graph = self.registry.graph(composition_id)
        if graph is None:
            raise UnknownComposition(f"no composition {composition_id!r}")
        return graph

    def create_composition(self, title: str, author_id: str) -> dict:
        self.require_user(author_id)
        with self._write_lock:
            descriptor, graph = new_composition(title, author_id)
            self.registry.add_module(descriptor)
            self.registry.add_graph(graph)
            self.ledger.register_module(descriptor, publish=True)
            self._persist_module(descriptor)
            self._persist_graph(graph)
            self._persist_ledger()
        return {
            "module": _descriptor_to_dict(descriptor),
            "graph": graph_to_dict(graph),
        }

    def import_package(self, data: bytes, author_id: str) -> dict:
        self.require_user(author_id)
        package = h5p.read_package(data)
        with self._write_lock:
            descriptor = ModuleDescriptor(
                module_id=fresh_id(),
                kind=ModuleKind.ATOMIC,
                title=package.manifest.title or "Imported module",
                author_id=author_id,
                content_ref=f"package:{package.manifest.main_library}",
            )
            self.registry.add_module(descriptor)
            self.registry.add_package(descriptor.module_id, package)
            self.ledger.register_module(descriptor, publish=True)
            self._persist_module(descriptor)
            self._persist_package(descriptor.module_id, h5p.write_package(package))
            self._persist_ledger()
        return _descriptor_to_dict(descriptor)

    def list_modules(self) -> list[dict]:
        return [
            _descriptor_to_dict(descriptor)
            for descriptor in sorted(
                self.registry.modules(), key=lambda d: (d.title.lower(), d.module_id)
            )
        ]

    def get_module(self, module_id: str) -> dict:
        descriptor = self.require_module(module_id)
        view = _descriptor_to_dict(descriptor)
        view["likes"] = len(self._likes.get(module_id, set()))
        view["published"] = self.ledger.is_published(module_id)
        view["empty"] = self._is_empty(descriptor)
        try:
            lineage = self.ledger.lineage(module_id)
        except UnknownModule:
            lineage = None
        if lineage is not None:
            view["reuses"] = lineage.reuse_count
            view["remixes"] = lineage.remix_count
        return view

    def _is_empty(self, descriptor: ModuleDescriptor) -> bool:
        """Empty modules send the author into the module's own editor."""
        if descriptor.kind is ModuleKind.COMPOSITE:
            graph = self.registry.graph(descriptor.content_ref)
            return graph is None or len(graph.nodes) <= 1
        package = self.registry.package_for(descriptor.module_id)
        return package is None or not package.content

    def derive_module(self, module_id: str, new_author: str) -> dict:
        self.require_user(new_author)
        with self._write_lock:
            derived = self.ledger.derive(module_id, new_author)
            self._persist_module(derived)
            if derived.kind is ModuleKind.COMPOSITE:
                self._persist_graph(self.registry.graph(derived.content_ref))
            else:
                package = self.registry.package_for(derived.module_id)
                if package is not None:
                    self._persist_package(derived.module_id, h5p.write_package(package))
            self._persist_ledger()
        return _descriptor_to_dict(derived)

    def publish_module(self, module_id: str) -> dict:
        self.require_module(module_id)
        with self._write_lock:
            self.ledger.publish(module_id)
            self._persist_ledger()
        return self.get_module(module_id)

    def get_composition(self, composition_id: str) -> dict:
        graph = self.require_graph(composition_id)
        owner = self.registry.module_for_composition(composition_id)
        return {
            "module": _descriptor_to_dict(owner) if owner else None,
            "graph": graph_to_dict(graph),
            "version": owner.version if owner else 1,
        }

    def update_composition(
        self,
        composition_id: str,
        graph_document: dict,
        expected_version: int,
        editor_id: Optional[str] = None,
    ) -> dict:
        with self._write_lock:
            self.require_graph(composition_id)
            owner = self.registry.module_for_composition(composition_id)
            if owner is None:
                raise UnknownComposition(
                    f"composition {composition_id!r} has no owning module"
                )
            if owner.version != expected_version:
                raise VersionConflict(
                    f"composition is at version {owner.version}, "
                    f"update expected {expected_version}"
                )
            document = dict(graph_document)
            document["compositionId"] = composition_id  # identity is server-owned
            previous = self.registry.graph(composition_id)
            graph = graph_from_dict(document)
            editor = editor_id or owner.author_id
            bumped = replace(owner, version=owner.version + 1)
            self.registry.add_graph(graph)
            self.registry.add_module(bumped)
            self.ledger.record_modification(owner.module_id)
            # fresh references to other authors' modules count as reuse
            before = {node.module_ref for node in previous.nodes}
            for ref in sorted(
                {node.module_ref for node in graph.nodes} - before
            ):
                if self.registry.resolve(ref) is not None and self.ledger.is_published(ref):
                    self.ledger.record_reuse(ref, composition_id, editor)
            self._persist_graph(graph)
            self._persist_module(bumped)
            self._persist_ledger()
            return self.get_composition(composition_id)

    def validate_composition(self, composition_id: str) -> dict:
        graph = self.require_graph(composition_id)
        return analysis.validate(graph, self.registry).to_dict()

    def merge_composition(self, composition_id: str, remix_module_id: str) -> dict:
        with self._write_lock:
            self.require_graph(composition_id)
            owner = self.registry.module_for_composition(composition_id)
            if owner is None:
                raise UnknownComposition(
                    f"composition {composition_id!r} has no owning module"
                )
            result: MergeResult = self.ledger.merge_from_remix(
                owner.module_id, remix_module_id
            )
            if result.clean:
                self._persist_graph(result.merged)
                self._persist_module(self.registry.resolve(owner.module_id))
                self._persist_ledger()
            return {
                "clean": result.clean,
                "graph": graph_to_dict(result.merged),
                "conflicts": [
                    {
                        "kind": c.kind,
                        "subject": c.subject,
                        "attribute": c.attribute,
                    }
                    for c in result.conflicts
                ],
            }

    def export_composition(self, composition_id: str) -> bytes:
        graph = self.require_graph(composition_id)
        package = h5p.export_composition(graph, self.registry)
        return h5p.write_package(package)

    # -- likes, favourites, search -------------------------------------------------

    def like(self, user_id: str, module_id: str) -> dict:
        self.require_user(user_id)
        self.require_module(module_id)
        with self._write_lock:
            users = self._likes.setdefault(module_id, set())
            users.add(user_id)  # idempotent; there is no way to dislike
            self._persist_likes(module_id)
        return {"moduleId": module_id, "likes": len(users)}

    def like_count(self, module_id: str) -> int:
        return len(self._likes.get(module_id, set()))

    def favourite(self, user_id: str, kind: str, target_id: str) -> dict:
        self.require_user(user_id)
        if kind == "module":
            self.require_module(target_id)
        elif kind == "avatar":
            self.require_user(target_id)  # an avatar is addressed by its owner
        else:
            raise UnknownTarget(f"favourite targets are modules or avatars, not {kind!r}")
        with self._write_lock:
            entries = self._favourites.setdefault(user_id, set())
            entries.add((kind, target_id))
            self._persist_favourites(user_id)
        return {"favourites": self.list_favourites(user_id)}

    def list_favourites(self, user_id: str) -> list[dict]:
        self.require_user(user_id)
        return [
            {"kind": kind, "id": target}
            for kind, target in sorted(self._favourites.get(user_id, set()))
        ]

    def search(
        self,
        query: str,
        type_filter: Optional[str] = None,
        user_id: Optional[str] = None,
    ) -> dict:
        """Existing modules first, ranked; the create-new affordance is a
        marker the UI renders after the results."""
        favourites = {
            target
            for kind, target in self._favourites.get(user_id or "", set())
            if kind == "module"
        }
        needle = query.strip().lower()
        results = []
        for descriptor in self.registry.modules():
            if not self.ledger.is_published(descriptor.module_id):
                continue
            if needle and needle not in descriptor.title.lower():
                continue
            if type_filter and not self._matches_type(descriptor, type_filter):
                continue
            results.append(descriptor)
        results.sort(
            key=lambda d: (
                d.module_id not in favourites,  # favourites first
                -self.like_count(d.module_id),
                d.title.lower(),
                d.module_id,
            )
        )
        views = []
        for descriptor in results:
            view = _descriptor_to_dict(descriptor)
            view["likes"] = self.like_count(descriptor.module_id)
            view["favourite"] = descriptor.module_id in favourites
            views.append(view)
        return {"results": views, "createNew": True}

    def _matches_type(self, descriptor: ModuleDescriptor, type_filter: str) -> bool:
        if type_filter in (ModuleKind.ATOMIC.value, ModuleKind.COMPOSITE.value):
            return descriptor.kind.value == type_filter
        package = self.registry.package_for(descriptor.module_id)
        return (
            package is not None
            and package.manifest.main_library.lower() == type_filter.lower()
        )

    # -- runs (sessions) --------------------------------------------------------------

    def start_run(self, composition_id: str, user_id: str) -> dict:
        self.require_user(user_id)
        with self._write_lock:
            session = runtime.start_session(self.registry, composition_id, user_id)
            self._sessions[session.session_id] = (session, user_id)
            self._persist_session(session, user_id)
        return _session_to_dict(session, user_id)

    def submit_run_outcome(self, run_id: str, outcome_fields: dict) -> dict:
        with self._write_lock:
            entry = self._sessions.get(run_id)
            if entry is None:
                raise UnknownRun(f"no run {run_id!r}")
            session, user_id = entry
            outcome = OutcomeRecord(
                node_id=outcome_fields["nodeId"],
                score_percent=outcome_fields["scorePercent"],
                completed=outcome_fields.get("completed", True),
                attempts=outcome_fields.get("attempts", 1),
                duration_seconds=outcome_fields.get("durationSeconds", 0.0),
                assessment_kind=AssessmentKind(
                    outcome_fields.get("assessmentKind", "reading")
                ),
            )
            session = runtime.submit_outcome(self.registry, session, outcome)
            self._sessions[run_id] = (session, user_id)
            self._persist_session(session, user_id)
            self.store.append_event(
                {"type": "outcome", "runId": run_id, "nodeId": outcome.node_id}
            )
            if session.status is SessionStatus.FINISHED:
                self._ensure_review_item(user_id, session)
        return _session_to_dict(session, user_id)

    def get_run(self, run_id: str) -> dict:
        entry = self._sessions.get(run_id)
        if entry is None:
            raise UnknownRun(f"no run {run_id!r}")
        return _session_to_dict(*entry)

    def run_trace_jsonl(self, run_id: str) -> str:
        entry = self._sessions.get(run_id)
        if entry is None:
            raise UnknownRun(f"no run {run_id!r}")
        return runtime.trace_to_jsonl(entry[0])

    def _ensure_review_item(self, user_id: str, session: SessionState) -> None:
        """Finishing a composition schedules it for spaced review."""
        owner = self.registry.module_for_composition(session.composition_id)
        module_ref = owner.module_id if owner else session.composition_id
        for item, item_user in self._reviews.values():
            if item_user == user_id and item.module_ref == module_ref:
                return
        item = ReviewItem(
            item_id=fresh_id(),
            module_ref=module_ref,
            due_date=date.today(),
        )
        self._reviews[item.item_id] = (item, user_id)
        self._persist_review(item, user_id)

    # -- reviews -----------------------------------------------------------------------

    def reviews_due(self, user_id: str, today: Optional[date] = None) -> list[dict]:
        self.require_user(user_id)
        today = today or date.today()
        mine = [item for item, owner in self._reviews.values() if owner == user_id]
        return [
            _review_to_dict(item, user_id)
            for item in scheduler.due_items(mine, today)
        ]

    def apply_review(
        self, item_id: str, grade: int, today: Optional[date] = None
    ) -> dict:
        with self._write_lock:
            entry = self._reviews.get(item_id)
            if entry is None:
                raise UnknownReviewItem(f"no review item {item_id!r}")
            item, user_id = entry
            item = scheduler.review(item, grade, today or date.today())
            self._reviews[item_id] = (item, user_id)
            self._persist_review(item, user_id)
        return _review_to_dict(item, user_id)

    # -- rewards and chat ----------------------------------------------------------------

    def rewards(self, user_id: str) -> dict:
        self.require_user(user_id)
        summary = self.ledger.rewards_summary(user_id)
        return {
            "userId": user_id,
            "totalPoints": summary.total_points,
            "badges": [
                {
                    "badgeId": badge.badge_id,
                    "label": badge.label,
                    "awardedAt": badge.awarded_at.isoformat(),
                }
                for badge in summary.badges
            ],
            "perModule": summary.per_module,
        }

    def chat_templates(self) -> dict:
        """The closed template catalog the dial menu offers."""
        return {
            "locales": list(self.catalog.locales),
            "templates": [
                {
                    "templateId": template_id,
                    "slots": list(template["slots"]),
                    "preview": template["text"].get(self.config.default_locale)
                    or template["text"]["en"],
                }
                for template_id, template in sorted(self.catalog.templates.items())
            ],
        }

    def send_chat(
        self, from_user: str, to_user: str, template_id: str, slots: dict[str, str]
    ) -> dict:
        self.require_user(from_user)
        self.require_user(to_user)
        required = self.catalog.required_slots(template_id)
        for slot in required:
            if slot not in slots:
                raise UnresolvedSlot(f"slot {slot!r} must reference a module")
            self.require_module(slots[slot])
        extras = set(slots) - set(required)
        if extras:
            raise UnresolvedSlot(f"template {template_id!r} has no slot {sorted(extras)}")
        message = ChatMessage(
            message_id=fresh_id(),
            from_user=from_user,
            to_user=to_user,
            template_id=template_id,
            slots=tuple(sorted(slots.items())),
        )
        with self._write_lock:
            self._messages.setdefault(to_user, []).append(message)
            self._persist_inbox(to_user)
        return self.render_message(message, self.config.default_locale)

    def render_message(self, message: ChatMessage, locale: str) -> dict:
        titles = {
            slot: self.require_module(module_id).title
            for slot, module_id in message.slots
        }
        return {
            "messageId": message.message_id,
            "fromUser": message.from_user,
            "toUser": message.to_user,
            "templateId": message.template_id,
            "slots": message.slot_map(),
            "sentAt": message.sent_at.isoformat(),
            "rendered": self.catalog.render(message.template_id, titles, locale),
        }

    def inbox(self, user_id: str, locale: Optional[str] = None) -> list[dict]:
        self.require_user(user_id)
        locale = locale or self.config.default_locale
        return [
            self.render_message(message, locale)
            for message in self._messages.get(user_id, [])
        ]
