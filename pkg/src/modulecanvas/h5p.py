"""Reader, validator and writer for the .h5p container format, plus the
exporter that compiles a composition into a single package.

Archive layout: ``h5p.json`` (manifest), ``content/content.json`` (the
content document), one directory per library holding ``library.json``
and ``semantics.json``.  Every other file rides along verbatim as an
asset.  Writing is deterministic: fixed entry order, fixed timestamps,
stored (uncompressed) entries, canonical JSON.

A composition exports as one package whose main library is a generated
player; the whole graph travels inside the content document (a player
attaches to a single node, so the graph cannot span multiple embeds),
and each node's sub-content is embedded under its own content path.
"""
from __future__ import annotations

import io
import json
import re
import zipfile
from dataclasses import dataclass, field
from typing import Any, Optional

from . import analysis
from .errors import CanvasError
from .model import (
    CONTENT_LICENCE,
    CompositionGraph,
    ModuleKind,
    ModuleRegistry,
    START_MODULE_REF,
    graph_to_dict,
)

MANIFEST_NAME = "h5p.json"
CONTENT_NAME = "content/content.json"
PLAYER_MACHINE_NAME = "CompositionPlayer"

MACHINE_NAME_RE = re.compile(r"^[A-Za-z0-9.\-]+$")

SEMANTICS_TYPES = (
    "text",
    "number",
    "boolean",
    "group",
    "list",
    "select",
    "library",
    "image",
    "video",
    "audio",
)

_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


class NotAnArchive(CanvasError):
    code = "NotAnArchive"


class MissingManifest(CanvasError):
    code = "MissingManifest"


class MalformedManifest(CanvasError):
    code = "MalformedManifest"

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


class DanglingDependency(CanvasError):
    code = "DanglingDependency"


class SemanticsViolation(CanvasError):
    code = "SemanticsViolation"

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        messages = [d.message if isinstance(d, ContentDiagnostic) else str(d) for d in diagnostics]
        super().__init__("; ".join(messages))
        self.diagnostics = list(diagnostics)


class ExportBlocked(CanvasError):
    code = "ExportBlocked"

    def __init__(self, report):
        super().__init__("composition has validation errors; export refused")
        self.report = report


class MissingPackage(CanvasError):
    code = "MissingPackage"


@dataclass(frozen=True)
class LibraryRef:
    machine_name: str
    major_version: int
    minor_version: int

    def to_dict(self) -> dict:
        return {
            "machineName": self.machine_name,
            "majorVersion": self.major_version,
            "minorVersion": self.minor_version,
        }


@dataclass(frozen=True)
class H5pManifest:
    title: str
    language: str
    main_library: str
    embed_types: tuple[str, ...]
    preloaded_dependencies: tuple[LibraryRef, ...]
    license: str

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "language": self.language,
            "mainLibrary": self.main_library,
            "embedTypes": list(self.embed_types),
            "preloadedDependencies": [ref.to_dict() for ref in self.preloaded_dependencies],
            "license": self.license,
        }


@dataclass(frozen=True)
class SemanticsField:
    """One schema field of a library's content document."""

    name: str
    type: str
    label: str = ""
    optional: bool = False
    entity: Optional[str] = None  # list
    item_field: Optional["SemanticsField"] = None  # list
    fields: tuple["SemanticsField", ...] = ()  # group
    minimum: Optional[float] = None  # number
    maximum: Optional[float] = None  # number
    options: tuple[Any, ...] = ()  # select
    default: Any = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "name": self.name,
            "type": self.type,
            "label": self.label,
            "optional": self.optional,
        }
        if self.entity is not None:
            out["entity"] = self.entity
        if self.item_field is not None:
            out["field"] = self.item_field.to_dict()
        if self.fields:
            out["fields"] = [f.to_dict() for f in self.fields]
        if self.minimum is not None:
            out["min"] = self.minimum
        if self.maximum is not None:
            out["max"] = self.maximum
        if self.options:
            out["options"] = list(self.options)
        if self.default is not None:
            out["default"] = self.default
        return out


@dataclass(frozen=True)
class LibraryDefinition:
    machine_name: str
    title: str
    major_version: int
    minor_version: int
    patch_version: int
    runnable: bool
    preloaded_scripts: tuple[str, ...] = ()
    preloaded_styles: tuple[str, ...] = ()
    preloaded_dependencies: tuple[LibraryRef, ...] = ()
    semantics: tuple[SemanticsField, ...] = ()

    @property
    def version(self) -> tuple[int, int, int]:
        return (self.major_version, self.minor_version, self.patch_version)

    def to_dict(self) -> dict:
        return {
            "machineName": self.machine_name,
            "title": self.title,
            "majorVersion": self.major_version,
            "minorVersion": self.minor_version,
            "patchVersion": self.patch_version,
            "runnable": self.runnable,
            "preloadedJs": list(self.preloaded_scripts),
            "preloadedCss": list(self.preloaded_styles),
            "preloadedDependencies": [ref.to_dict() for ref in self.preloaded_dependencies],
        }


@dataclass
class H5pPackage:
    """In-memory model of a .h5p archive."""

    manifest: H5pManifest
    libraries: tuple[LibraryDefinition, ...]
    content: Any
    assets: dict[str, bytes] = field(default_factory=dict)

    def __post_init__(self):
        self.libraries = tuple(
            sorted(self.libraries, key=lambda lib: lib.machine_name)
        )

    def library(self, machine_name: str) -> Optional[LibraryDefinition]:
        for lib in self.libraries:
            if lib.machine_name == machine_name:
                return lib
        return None


@dataclass(frozen=True)
class ContentDiagnostic:
    code: str  # MissingField | TypeMismatch | RangeViolation | UnknownField | UnknownOption
    path: str
    message: str


# ---------------------------------------------------------------------------
# Content validation against a semantics schema.


def _check_value(fld: SemanticsField, value: Any, path: str, out: list[ContentDiagnostic]):
    def diag(code, message):
        out.append(ContentDiagnostic(code, path, f"{path}: {message}"))

    if fld.type == "text":
        if not isinstance(value, str):
            diag("TypeMismatch", f"expected text, got {type(value).__name__}")
    elif fld.type == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            diag("TypeMismatch", f"expected number, got {type(value).__name__}")
            return
        if fld.minimum is not None and value < fld.minimum:
            diag("RangeViolation", f"{value} below minimum {fld.minimum}")
        if fld.maximum is not None and value > fld.maximum:
            diag("RangeViolation", f"{value} above maximum {fld.maximum}")
    elif fld.type == "boolean":
        if not isinstance(value, bool):
            diag("TypeMismatch", f"expected boolean, got {type(value).__name__}")
    elif fld.type == "group":
        if not isinstance(value, dict):
            diag("TypeMismatch", f"expected object, got {type(value).__name__}")
            return
        _check_object(fld.fields, value, path, out)
    elif fld.type == "list":
        if not isinstance(value, list):
            diag("TypeMismatch", f"expected list, got {type(value).__name__}")
            return
        for i, item in enumerate(value):
            _check_value(fld.item_field, item, f"{path}/{i}", out)
    elif fld.type == "select":
        if value not in fld.options:
            diag("UnknownOption", f"{value!r} not one of {list(fld.options)}")
    else:  # library, image, video, audio: structured references
        if not isinstance(value, dict):
            diag("TypeMismatch", f"expected a {fld.type} reference object")


def _check_object(fields: tuple[SemanticsField, ...], content: dict, path: str,
                  out: list[ContentDiagnostic]):
    by_name = {fld.name: fld for fld in fields}
    for fld in fields:
        value = content.get(fld.name)
        if value is None:
            if not fld.optional and fld.default is None:
                out.append(
                    ContentDiagnostic(
                        "MissingField",
                        f"{path}/{fld.name}",
                        f"{path}/{fld.name}: required field missing",
                    )
                )
            continue
        _check_value(fld, value, f"{path}/{fld.name}", out)
    for key in content:
        if key not in by_name:
            out.append(
                ContentDiagnostic(
                    "UnknownField",
                    f"{path}/{key}",
                    f"{path}/{key}: not declared by the semantics",
                )
            )


def validate_content(content: Any, semantics: tuple[SemanticsField, ...]) -> list[ContentDiagnostic]:
    """Diagnostics for a content document against a schema; empty iff it
    conforms (required fields present, types match, numbers in range,
    list items each conform to the item field)."""
    out: list[ContentDiagnostic] = []
    if not isinstance(content, dict):
        out.append(
            ContentDiagnostic("TypeMismatch", "/", "/: content document must be an object")
        )
        return out
    _check_object(tuple(semantics), content, "", out)
    return out


def validate_semantics(fields: tuple[SemanticsField, ...], path: str) -> list[str]:
    """Schema-level invariants: list entity non-empty, groups non-empty,
    sibling names unique, known types."""
    problems: list[str] = []
    seen = set()
    for fld in fields:
        here = f"{path}/{fld.name}"
        if fld.name in seen:
            problems.append(f"{here}: duplicate sibling field name")
        seen.add(fld.name)
        if fld.type not in SEMANTICS_TYPES:
            problems.append(f"{here}: unknown semantics type {fld.type!r}")
            continue
        if fld.type == "list":
            if not fld.entity:
                problems.append(f"{here}: list field requires a non-empty entity name")
            if fld.item_field is None:
                problems.append(f"{here}: list field requires an item field")
            else:
                problems.extend(validate_semantics((fld.item_field,), here))
        if fld.type == "group":
            if not fld.fields:
                problems.append(f"{here}: group field requires at least one child")
            problems.extend(validate_semantics(fld.fields, here))
        if fld.type == "select" and not fld.options:
            problems.append(f"{here}: select field requires options")
    return problems


# ---------------------------------------------------------------------------
# JSON (de)serialization of the metadata files, with field diagnostics.


def _require(obj: dict, key: str, kind, where: str, problems: list[str], default=None):
    if key not in obj or obj[key] is None:
        problems.append(f"{where}: missing field {key!r}")
        return default
    value = obj[key]
    if kind is int and isinstance(value, bool):
        problems.append(f"{where}: field {key!r} must be an integer")
        return default
    if not isinstance(value, kind):
        problems.append(f"{where}: field {key!r} has the wrong type")
        return default
    return value


def _ref_from_dict(obj: dict, where: str, problems: list[str]) -> LibraryRef:
    name = _require(obj, "machineName", str, where, problems, "")
    major = _require(obj, "majorVersion", int, where, problems, 0)
    minor = _require(obj, "minorVersion", int, where, problems, 0)
    if isinstance(major, int) and major < 0 or isinstance(minor, int) and minor < 0:
        problems.append(f"{where}: versions must be non-negative")
    return LibraryRef(name, major, minor)


def _manifest_from_dict(obj: Any) -> H5pManifest:
    problems: list[str] = []
    if not isinstance(obj, dict):
        raise MalformedManifest("h5p.json: manifest must be a JSON object")
    title = _require(obj, "title", str, "h5p.json", problems, "")
    language = _require(obj, "language", str, "h5p.json", problems, "en")
    main_library = _require(obj, "mainLibrary", str, "h5p.json", problems, "")
    embed_types = obj.get("embedTypes", [])
    if not isinstance(embed_types, list) or not all(isinstance(e, str) for e in embed_types):
        problems.append("h5p.json: field 'embedTypes' must be a list of strings")
        embed_types = []
    deps_raw = obj.get("preloadedDependencies", [])
    if not isinstance(deps_raw, list):
        problems.append("h5p.json: field 'preloadedDependencies' must be a list")
        deps_raw = []
    deps = []
    for i, entry in enumerate(deps_raw):
        where = f"h5p.json:preloadedDependencies[{i}]"
        if not isinstance(entry, dict):
            problems.append(f"{where}: must be an object")
            continue
        deps.append(_ref_from_dict(entry, where, problems))
    license_ = _require(obj, "license", str, "h5p.json", problems, "")
    if problems:
        raise MalformedManifest(problems)
    return H5pManifest(title, language, main_library, tuple(embed_types), tuple(deps), license_)


def _field_from_dict(obj: dict, where: str, problems: list[str]) -> SemanticsField:
    name = _require(obj, "name", str, where, problems, "")
    type_ = _require(obj, "type", str, where, problems, "text")
    item = obj.get("field")
    item_field = (
        _field_from_dict(item, f"{where}/{name}", problems) if isinstance(item, dict) else None
    )
    fields_raw = obj.get("fields", [])
    fields = tuple(
        _field_from_dict(f, f"{where}/{name}", problems)
        for f in fields_raw
        if isinstance(f, dict)
    )
    return SemanticsField(
        name=name,
        type=type_,
        label=obj.get("label", ""),
        optional=bool(obj.get("optional", False)),
        entity=obj.get("entity"),
        item_field=item_field,
        fields=fields,
        minimum=obj.get("min"),
        maximum=obj.get("max"),
        options=tuple(obj.get("options", [])),
        default=obj.get("default"),
    )


def _library_from_dict(obj: Any, where: str, semantics_raw: Any) -> LibraryDefinition:
    problems: list[str] = []
    if not isinstance(obj, dict):
        raise MalformedManifest(f"{where}: library.json must be a JSON object")
    name = _require(obj, "machineName", str, where, problems, "")
    if name and not MACHINE_NAME_RE.match(name):
        problems.append(f"{where}: machine name {name!r} is not valid")
    versions = {}
    for key in ("majorVersion", "minorVersion", "patchVersion"):
        value = _require(obj, key, int, where, problems, 0)
        if isinstance(value, int) and value < 0:
            problems.append(f"{where}: {key} must be non-negative")
        versions[key] = value
    scripts = tuple(obj.get("preloadedJs", []))
    styles = tuple(obj.get("preloadedCss", []))
    for path in scripts + styles:
        if not isinstance(path, str) or path.startswith("/") or ".." in path.split("/"):
            problems.append(f"{where}: asset path {path!r} must be archive-relative")
    deps_raw = obj.get("preloadedDependencies", [])
    deps = tuple(
        _ref_from_dict(d, f"{where}:preloadedDependencies[{i}]", problems)
        for i, d in enumerate(deps_raw)
        if isinstance(d, dict)
    )
    semantics: tuple[SemanticsField, ...] = ()
    if semantics_raw is not None:
        if not isinstance(semantics_raw, list):
            problems.append(f"{where}: semantics.json must be a JSON list")
        else:
            semantics = tuple(
                _field_from_dict(f, f"{where}:semantics", problems)
                for f in semantics_raw
                if isinstance(f, dict)
            )
    if problems:
        raise MalformedManifest(problems)
    return LibraryDefinition(
        machine_name=name,
        title=obj.get("title", name),
        major_version=versions["majorVersion"],
        minor_version=versions["minorVersion"],
        patch_version=versions["patchVersion"],
        runnable=bool(obj.get("runnable", False)),
        preloaded_scripts=scripts,
        preloaded_styles=styles,
        preloaded_dependencies=deps,
        semantics=semantics,
    )


def _canonical_json_bytes(obj: Any) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def check_package(package: H5pPackage) -> None:
    """All package invariants; raises the matching error."""
    manifest = package.manifest
    known = {lib.machine_name for lib in package.libraries}
    if len(known) != len(package.libraries):
        raise MalformedManifest("a package carries one version per machine name")
    if manifest.main_library not in {ref.machine_name for ref in manifest.preloaded_dependencies}:
        raise MalformedManifest(
            f"h5p.json: mainLibrary {manifest.main_library!r} not among preloadedDependencies"
        )
    for ref in manifest.preloaded_dependencies:
        if ref.machine_name not in known:
            raise DanglingDependency(
                f"h5p.json: dependency {ref.machine_name!r} not present in the package"
            )
        if ref.major_version < 0 or ref.minor_version < 0:
            raise MalformedManifest("h5p.json: versions must be non-negative")
    problems: list[str] = []
    for lib in package.libraries:
        if not MACHINE_NAME_RE.match(lib.machine_name):
            problems.append(f"{lib.machine_name}: invalid machine name")
        for path in lib.preloaded_scripts + lib.preloaded_styles:
            if path.startswith("/") or ".." in path.split("/"):
                problems.append(f"{lib.machine_name}: asset path {path!r} must be archive-relative")
        for ref in lib.preloaded_dependencies:
            if ref.machine_name not in known:
                raise DanglingDependency(
                    f"{lib.machine_name}: dependency {ref.machine_name!r} not present in the package"
                )
    if problems:
        raise MalformedManifest(problems)
    schema_problems: list[str] = []
    for lib in package.libraries:
        schema_problems.extend(validate_semantics(lib.semantics, lib.machine_name))
    if schema_problems:
        raise SemanticsViolation(schema_problems)
    main = package.library(manifest.main_library)
    diagnostics = validate_content(package.content, main.semantics)
    if diagnostics:
        raise SemanticsViolation(diagnostics)


def read_package(data: bytes) -> H5pPackage:
    """Parse and fully check a .h5p archive; unknown files are preserved
    verbatim as assets."""
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile:
        raise NotAnArchive("input is not a zip archive") from None
    names = [info.filename for info in archive.infolist() if not info.is_dir()]
    for name in names:
        if name.startswith("/") or ".." in name.split("/"):
            raise MalformedManifest(f"unsafe archive path {name!r}")
    if MANIFEST_NAME not in names:
        raise MissingManifest("archive has no h5p.json")

    def read_json(name: str) -> Any:
        try:
            return json.loads(archive.read(name).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as err:
            raise MalformedManifest(f"{name}: not valid JSON ({err})") from None

    manifest = _manifest_from_dict(read_json(MANIFEST_NAME))
    content = read_json(CONTENT_NAME) if CONTENT_NAME in names else {}

    libraries = []
    consumed = {MANIFEST_NAME}
    if CONTENT_NAME in names:
        consumed.add(CONTENT_NAME)
    for name in names:
        parts = name.split("/")
        if len(parts) == 2 and parts[1] == "library.json":
            directory = parts[0]
            semantics_name = f"{directory}/semantics.json"
            semantics_raw = read_json(semantics_name) if semantics_name in names else None
            libraries.append(
                _library_from_dict(read_json(name), name, semantics_raw)
            )
            consumed.add(name)
            if semantics_name in names:
                consumed.add(semantics_name)

    assets = {name: archive.read(name) for name in names if name not in consumed}
    package = H5pPackage(manifest, tuple(libraries), content, assets)
    check_package(package)
    return package


def write_package(package: H5pPackage) -> bytes:
    """Deterministic archive bytes; read_package(write_package(p)) == p."""
    check_package(package)
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_STORED) as archive:

        def write(name: str, data: bytes):
            info = zipfile.ZipInfo(name, date_time=_ZIP_EPOCH)
            info.external_attr = 0o644 << 16
            archive.writestr(info, data)

        write(MANIFEST_NAME, _canonical_json_bytes(package.manifest.to_dict()))
        write(CONTENT_NAME, _canonical_json_bytes(package.content))
        for lib in package.libraries:  # already sorted by machine name
            write(f"{lib.machine_name}/library.json", _canonical_json_bytes(lib.to_dict()))
            write(
                f"{lib.machine_name}/semantics.json",
                _canonical_json_bytes([f.to_dict() for f in lib.semantics]),
            )
        for path in sorted(package.assets):
            write(path, package.assets[path])
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# Composition export.


def _text(name: str, label: str = "", optional: bool = False) -> SemanticsField:
    return SemanticsField(name=name, type="text", label=label or name, optional=optional)


def _player_library() -> LibraryDefinition:
    node_item = SemanticsField(
        name="node",
        type="group",
        label="Node",
        fields=(
            _text("nodeId"),
            _text("moduleRef"),
            _text("displayLabel", optional=True),
        ),
    )
    edge_item = SemanticsField(
        name="edge",
        type="group",
        label="Flow edge",
        fields=(
            _text("from"),
            _text("to"),
            _text("condition", optional=True),
            SemanticsField(name="priority", type="number", label="priority", minimum=0),
        ),
    )
    composition = SemanticsField(
        name="composition",
        type="group",
        label="Composition graph",
        fields=(
            _text("compositionId"),
            _text("startNodeId"),
            SemanticsField(
                name="nodes", type="list", label="Nodes", entity="node", item_field=node_item
            ),
            SemanticsField(
                name="edges", type="list", label="Edges", entity="edge", item_field=edge_item
            ),
        ),
    )
    sub_content_item = SemanticsField(
        name="subContent",
        type="group",
        label="Embedded module content",
        fields=(
            _text("nodeId"),
            _text("mainLibrary"),
            _text("params"),
        ),
    )
    sub_contents = SemanticsField(
        name="subContents",
        type="list",
        label="Per-node content",
        entity="subContent",
        item_field=sub_content_item,
    )
    return LibraryDefinition(
        machine_name=PLAYER_MACHINE_NAME,
        title="Composition Player",
        major_version=1,
        minor_version=0,
        patch_version=0,
        runnable=True,
        semantics=(composition, sub_contents),
    )


def _pick_higher(kept: LibraryDefinition, candidate: LibraryDefinition,
                 diagnostics: Optional[list]) -> LibraryDefinition:
    if candidate.version <= kept.version:
        winner, loser = kept, candidate
    else:
        winner, loser = candidate, kept
    if winner.major_version != loser.major_version and diagnostics is not None:
        diagnostics.append(
            f"library {winner.machine_name}: major versions "
            f"{loser.major_version} and {winner.major_version} both referenced; "
            f"kept {'.'.join(map(str, winner.version))}"
        )
    return winner


def export_composition(
    graph: CompositionGraph,
    registry: ModuleRegistry,
    diagnostics: Optional[list] = None,
) -> H5pPackage:
    """Compile a validated composition into a single package.

    The canonical graph document lands at content path /composition;
    each node's content is embedded as a JSON-encoded params string under
    /subContents.  Libraries of all referenced packages are pooled,
    deduplicated by machine name keeping the highest version.
    """
    report = analysis.validate(graph, registry)
    if report.has_errors:
        raise ExportBlocked(report)

    player = _player_library()
    pool: dict[str, LibraryDefinition] = {player.machine_name: player}
    sources: dict[str, H5pPackage] = {}
    dep_refs: dict[str, LibraryRef] = {
        player.machine_name: LibraryRef(
            player.machine_name, player.major_version, player.minor_version
        )
    }
    assets: dict[str, bytes] = {}
    sub_contents: list[dict] = []

    def absorb_library(lib: LibraryDefinition, source: H5pPackage):
        kept = pool.get(lib.machine_name)
        if kept is None:
            pool[lib.machine_name] = lib
            sources[lib.machine_name] = source
        elif kept != lib:
            winner = _pick_higher(kept, lib, diagnostics)
            pool[lib.machine_name] = winner
            if winner is lib:
                sources[lib.machine_name] = source

    def absorb_ref(ref: LibraryRef):
        kept = dep_refs.get(ref.machine_name)
        if kept is None or (ref.major_version, ref.minor_version) > (
            kept.major_version,
            kept.minor_version,
        ):
            if (
                kept is not None
                and kept.major_version != ref.major_version
                and diagnostics is not None
            ):
                diagnostics.append(
                    f"dependency {ref.machine_name}: major versions "
                    f"{kept.major_version} and {ref.major_version} both referenced"
                )
            dep_refs[ref.machine_name] = ref

    for node in sorted(graph.nodes, key=lambda n: n.node_id):
        if node.module_ref == START_MODULE_REF:
            continue
        descriptor = registry.resolve(node.module_ref)
        if descriptor.kind is ModuleKind.COMPOSITE:
            sub_graph = registry.graph(descriptor.content_ref)
            if sub_graph is None:
                raise MissingPackage(
                    f"no graph registered for composite module {node.module_ref!r}"
                )
            sub_package = export_composition(sub_graph, registry, diagnostics)
            params = sub_package.content
            main_library = sub_package.manifest.main_library
        else:
            sub_package = registry.package_for(node.module_ref)
            if sub_package is None:
                raise MissingPackage(
                    f"no package registered for module {node.module_ref!r}"
                )
            params = sub_package.content
            main_library = sub_package.manifest.main_library
        for lib in sub_package.libraries:
            absorb_library(lib, sub_package)
        for ref in sub_package.manifest.preloaded_dependencies:
            absorb_ref(ref)
        for path, data in sub_package.assets.items():
            if path.startswith("content/"):
                assets[f"content/{node.node_id}/{path[len('content/'):]}"] = data
        sub_contents.append(
            {
                "nodeId": node.node_id,
                "mainLibrary": main_library,
                "params": json.dumps(params, sort_keys=True),
            }
        )

    # asset files of each kept library travel with it
    for machine_name, source in sources.items():
        for path, data in source.assets.items():
            if path.startswith(f"{machine_name}/"):
                assets.setdefault(path, data)

    owner = registry.module_for_composition(graph.composition_id)
    manifest = H5pManifest(
        title=owner.title if owner else "Composition",
        language="en",
        main_library=player.machine_name,
        embed_types=("div",),
        preloaded_dependencies=tuple(
            dep_refs[name] for name in sorted(dep_refs)
        ),
        license=CONTENT_LICENCE,
    )
    content = {
        "composition": graph_to_dict(graph),
        "subContents": sub_contents,
    }
    package = H5pPackage(manifest, tuple(pool.values()), content, assets)
    check_package(package)
    return package


def summarize(package: H5pPackage) -> dict:
    """Inspection view used by the CLI."""
    return {
        "title": package.manifest.title,
        "language": package.manifest.language,
        "mainLibrary": package.manifest.main_library,
        "license": package.manifest.license,
        "libraries": [
            {
                "machineName": lib.machine_name,
                "version": ".".join(map(str, lib.version)),
                "runnable": lib.runnable,
            }
            for lib in package.libraries
        ],
        "contentKeys": sorted(package.content) if isinstance(package.content, dict) else [],
        "assetCount": len(package.assets),
    }
