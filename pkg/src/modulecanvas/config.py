"""Service configuration: JSON file, overridable by environment variables."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8080
    store_path: Optional[str] = None
    # scrypt cost parameters (memory-hard salted password hash)
    scrypt_n: int = 2**14
    scrypt_r: int = 8
    scrypt_p: int = 1
    chat_catalog_path: Optional[str] = None
    default_locale: str = "en"


def load_config(
    path: Optional[str | Path] = None, env: Optional[Mapping[str, str]] = None
) -> ServiceConfig:
    """File values first, then MODULECANVAS_* environment overrides."""
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        values = {
            "port": data.get("port"),
            "store_path": data.get("storePath"),
            "scrypt_n": data.get("scrypt", {}).get("n"),
            "scrypt_r": data.get("scrypt", {}).get("r"),
            "scrypt_p": data.get("scrypt", {}).get("p"),
            "chat_catalog_path": data.get("chatCatalogPath"),
            "default_locale": data.get("defaultLocale"),
        }
        values = {k: v for k, v in values.items() if v is not None}
    overrides = {
        "port": env.get("MODULECANVAS_PORT"),
        "store_path": env.get("MODULECANVAS_STORE_PATH"),
        "scrypt_n": env.get("MODULECANVAS_SCRYPT_N"),
        "scrypt_r": env.get("MODULECANVAS_SCRYPT_R"),
        "scrypt_p": env.get("MODULECANVAS_SCRYPT_P"),
        "chat_catalog_path": env.get("MODULECANVAS_CHAT_CATALOG"),
        "default_locale": env.get("MODULECANVAS_LOCALE"),
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    for key in ("port", "scrypt_n", "scrypt_r", "scrypt_p"):
        if key in values:
            values[key] = int(values[key])
    return ServiceConfig(**values)
