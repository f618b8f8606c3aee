"""Command line entry points: serve, import, export, validate, inspect."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from . import analysis, h5p
from .config import load_config
from .errors import CanvasError
from .model import graph_from_json
from .service import CommunityService


def _service_for(args) -> CommunityService:
    config = load_config(args.config) if getattr(args, "config", None) else load_config()
    if getattr(args, "store", None):
        config = replace(config, store_path=args.store)
    if getattr(args, "port", None):
        config = replace(config, port=args.port)
    return CommunityService(config)


def _ensure_author(service: CommunityService, logon: str) -> str:
    user_id = service.user_id_for_logon(logon)
    if user_id is not None:
        return user_id
    import secrets

    result = service.register(logon, secrets.token_urlsafe(16))
    print(f"created operator account {logon!r}", file=sys.stderr)
    return result.account.user_id


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    service = _service_for(args)
    app = create_app(service)
    uvicorn.run(app, host=args.host, port=service.config.port)
    return 0


def cmd_import(args) -> int:
    service = _service_for(args)
    data = Path(args.file).read_bytes()
    author = _ensure_author(service, args.author)
    descriptor = service.import_package(data, author)
    print(json.dumps(descriptor, indent=2))
    return 0


def cmd_export(args) -> int:
    service = _service_for(args)
    data = service.export_composition(args.composition_id)
    Path(args.output).write_bytes(data)
    print(f"wrote {len(data)} bytes to {args.output}", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    target = Path(args.target)
    if target.exists():
        graph = graph_from_json(target.read_text(encoding="utf-8"))
        report = analysis.validate(graph).to_dict()
    else:
        service = _service_for(args)
        report = service.validate_composition(args.target)
    print(json.dumps(report, indent=2))
    return 1 if report["errors"] else 0


def cmd_inspect(args) -> int:
    package = h5p.read_package(Path(args.file).read_bytes())
    print(json.dumps(h5p.summarize(package), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modulecanvas",
        description="Compose, validate, package and serve e-learning modules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", help="JSON config file")
    serve.add_argument("--store", help="store directory (overrides config)")
    serve.add_argument("--port", type=int, help="port (overrides config)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(func=cmd_serve)

    imp = sub.add_parser("import", help="import a .h5p package into the store")
    imp.add_argument("file")
    imp.add_argument("--store", help="store directory")
    imp.add_argument("--config", help="JSON config file")
    imp.add_argument("--author", default="operator", help="author logon id")
    imp.set_defaults(func=cmd_import)

    exp = sub.add_parser("export", help="export a composition as .h5p")
    exp.add_argument("composition_id")
    exp.add_argument("-o", "--output", required=True)
    exp.add_argument("--store", help="store directory")
    exp.add_argument("--config", help="JSON config file")
    exp.set_defaults(func=cmd_export)

    val = sub.add_parser("validate", help="validate a graph file or stored composition")
    val.add_argument("target", help="graph JSON file path, or a composition id")
    val.add_argument("--store", help="store directory")
    val.add_argument("--config", help="JSON config file")
    val.set_defaults(func=cmd_validate)

    ins = sub.add_parser("inspect", help="summarize a .h5p package")
    ins.add_argument("file")
    ins.set_defaults(func=cmd_inspect)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CanvasError as err:
        print(json.dumps({"error": err.code, "message": str(err)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
