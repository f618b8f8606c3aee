"""Dial-menu chat: a closed catalog of localizable sentence templates.

There is no free text anywhere; messages are a template id plus module
references for the slots, which keeps every message translatable and the
whole channel safe for children.  New templates arrive by editing the
catalog file, never through user input.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import CanvasError


class UnknownTemplate(CanvasError):
    code = "UnknownTemplate"


class UnresolvedSlot(CanvasError):
    code = "UnresolvedSlot"


DEFAULT_CATALOG = {
    "locales": ["en", "nb"],
    "templates": {
        "T-LIKE": {
            "slots": [],
            "text": {
                "en": "I like this module!",
                "nb": "Jeg liker denne modulen!",
            },
        },
        "T-SUGGEST": {
            "slots": ["module"],
            "text": {
                "en": "you should add [{module}] to your composition!",
                "nb": "du burde legge til [{module}] i komposisjonen din!",
            },
        },
        "T-THANKS": {
            "slots": [],
            "text": {
                "en": "thank you!",
                "nb": "takk!",
            },
        },
        "T-CHECKOUT": {
            "slots": ["module"],
            "text": {
                "en": "check out [{module}]!",
                "nb": "sjekk ut [{module}]!",
            },
        },
    },
}


@dataclass(frozen=True)
class ChatMessage:
    message_id: str
    from_user: str
    to_user: str
    template_id: str
    slots: tuple[tuple[str, str], ...]  # slot name -> module id
    sent_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def slot_map(self) -> dict[str, str]:
        return dict(self.slots)


class ChatCatalog:
    def __init__(self, catalog: dict):
        self.locales: tuple[str, ...] = tuple(catalog.get("locales", ["en"]))
        self.templates: dict[str, dict] = dict(catalog.get("templates", {}))

    @classmethod
    def default(cls) -> "ChatCatalog":
        return cls(DEFAULT_CATALOG)

    @classmethod
    def from_file(cls, path: str | Path) -> "ChatCatalog":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def template(self, template_id: str) -> dict:
        template = self.templates.get(template_id)
        if template is None:
            raise UnknownTemplate(f"no chat template {template_id!r}")
        return template

    def required_slots(self, template_id: str) -> tuple[str, ...]:
        return tuple(self.template(template_id)["slots"])

    def render(
        self, template_id: str, slot_titles: dict[str, str], locale: str = "en"
    ) -> str:
        template = self.template(template_id)
        text = template["text"].get(locale) or template["text"]["en"]
        try:
            return text.format(**slot_titles)
        except (KeyError, IndexError) as err:
            raise UnresolvedSlot(f"template {template_id!r} slot {err} unfilled") from None
