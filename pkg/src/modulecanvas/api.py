"""HTTP/JSON API over the community service.

Engine errors map to HTTP statuses by their stable code; everything else
is a 400 with the code in the body so clients never parse messages.
"""
from __future__ import annotations

from datetime import date
from typing import Any, Optional

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import conditions
from .errors import CanvasError
from .service import CommunityService

ERROR_STATUS = {
    # not found
    "UnknownModule": 404,
    "UnknownComposition": 404,
    "UnknownUser": 404,
    "UnknownRun": 404,
    "UnknownReviewItem": 404,
    "UnknownTarget": 404,
    "UnknownTemplate": 404,
    "MissingPackage": 404,
    # a node reference only ever goes wrong inside a request payload
    "UnknownNode": 422,
    # conflicts
    "LogonIdTaken": 409,
    "VersionConflict": 409,
    "DuplicateDefault": 409,
    "DuplicatePriority": 409,
    "CyclicComposition": 409,
    "UnrelatedHistories": 409,
    "ExportBlocked": 409,
    "ValidationErrorsPresent": 409,
    "SessionNotActive": 409,
    "SessionNotFinished": 409,
    # bad input
    "EmptyTitle": 422,
    "WeakPassword": 422,
    "ConditionSyntax": 422,
    "InvalidCondition": 422,
    "InvalidRecord": 422,
    "InvalidGrade": 422,
    "InvalidAvatarName": 422,
    "WrongNode": 422,
    "UnresolvedSlot": 422,
    # authentication
    "InvalidCredentials": 401,
}


class RegisterBody(BaseModel):
    logonId: str
    password: str
    email: Optional[str] = None
    avatarName: Optional[str] = None


class LoginBody(BaseModel):
    logonId: str
    password: str


class CreateModuleBody(BaseModel):
    title: str
    authorId: str


class DeriveBody(BaseModel):
    newAuthorId: str


class UserRefBody(BaseModel):
    userId: str


class UpdateCompositionBody(BaseModel):
    graph: dict
    expectedVersion: int
    editorId: Optional[str] = None


class MergeBody(BaseModel):
    remixModuleId: str


class StartRunBody(BaseModel):
    compositionId: str
    userId: str


class OutcomeBody(BaseModel):
    nodeId: str
    scorePercent: float
    completed: bool = True
    attempts: int = 1
    durationSeconds: float = 0.0
    assessmentKind: str = "reading"


class ReviewBody(BaseModel):
    grade: int
    today: Optional[str] = None  # ISO date; defaults to the server's today


class ChatBody(BaseModel):
    fromUser: str
    toUser: str
    templateId: str
    slots: dict[str, str] = {}


class ConditionBody(BaseModel):
    source: str


def create_app(service: CommunityService) -> FastAPI:
    app = FastAPI(title="modulecanvas", version="0.1.0")

    @app.exception_handler(CanvasError)
    async def canvas_error_handler(_: Request, err: CanvasError):
        body: dict[str, Any] = {"error": err.code, "message": str(err)}
        if hasattr(err, "report"):
            body["report"] = err.report.to_dict()
        if hasattr(err, "diagnostic"):
            diag = err.diagnostic
            body["diagnostic"] = {
                "line": diag.line,
                "column": diag.column,
                "message": diag.message,
                "expected": diag.expected,
            }
        if hasattr(err, "diagnostics"):
            body["diagnostics"] = [str(d) for d in err.diagnostics]
        return JSONResponse(status_code=ERROR_STATUS.get(err.code, 400), content=body)

    # -- users ------------------------------------------------------------

    @app.post("/users", status_code=201)
    def register(body: RegisterBody):
        result = service.register(
            body.logonId, body.password, body.email, body.avatarName
        )
        return {
            "userId": result.account.user_id,
            "logonId": result.account.logon_id,
            "avatar": result.account.avatar.to_dict(),
            "avatarNameNotice": result.avatar_name_notice,
        }

    @app.post("/login")
    def login(body: LoginBody):
        return service.login(body.logonId, body.password)

    @app.get("/users/{user_id}/rewards")
    def rewards(user_id: str):
        return service.rewards(user_id)

    @app.get("/users/{user_id}/favourites")
    def list_favourites(user_id: str):
        return {"favourites": service.list_favourites(user_id)}

    @app.post("/users/{owner_id}/avatar/favourite")
    def favourite_avatar(owner_id: str, body: UserRefBody):
        return service.favourite(body.userId, "avatar", owner_id)

    # -- modules ------------------------------------------------------------

    @app.get("/modules")
    def list_modules():
        return {"modules": service.list_modules()}

    @app.post("/modules", status_code=201)
    def create_module(body: CreateModuleBody):
        return service.create_composition(body.title, body.authorId)

    @app.get("/modules/{module_id}")
    def get_module(module_id: str):
        return service.get_module(module_id)

    @app.post("/modules/{module_id}/derive", status_code=201)
    def derive(module_id: str, body: DeriveBody):
        return service.derive_module(module_id, body.newAuthorId)

    @app.post("/modules/{module_id}/publish")
    def publish(module_id: str):
        return service.publish_module(module_id)

    @app.post("/modules/{module_id}/like")
    def like(module_id: str, body: UserRefBody):
        return service.like(body.userId, module_id)

    @app.post("/modules/{module_id}/favourite")
    def favourite_module(module_id: str, body: UserRefBody):
        return service.favourite(body.userId, "module", module_id)

    @app.get("/search")
    def search(
        q: str = "",
        type: Optional[str] = Query(default=None),
        userId: Optional[str] = Query(default=None),
    ):
        return service.search(q, type_filter=type, user_id=userId)

    # -- compositions ----------------------------------------------------------

    @app.post("/compositions", status_code=201)
    def create_composition(body: CreateModuleBody):
        return service.create_composition(body.title, body.authorId)

    @app.get("/compositions/{composition_id}")
    def get_composition(composition_id: str):
        return service.get_composition(composition_id)

    @app.put("/compositions/{composition_id}")
    def update_composition(composition_id: str, body: UpdateCompositionBody):
        return service.update_composition(
            composition_id, body.graph, body.expectedVersion, body.editorId
        )

    @app.post("/compositions/{composition_id}/validate")
    def validate_composition(composition_id: str):
        return service.validate_composition(composition_id)

    @app.post("/compositions/{composition_id}/merge")
    def merge_composition(composition_id: str, body: MergeBody):
        return service.merge_composition(composition_id, body.remixModuleId)

    @app.get("/compositions/{composition_id}/export")
    def export_composition(composition_id: str):
        data = service.export_composition(composition_id)
        return Response(
            content=data,
            media_type="application/zip",
            headers={
                "Content-Disposition": f'attachment; filename="{composition_id}.h5p"'
            },
        )

    @app.post("/import", status_code=201)
    async def import_package(request: Request, authorId: str):
        data = await request.body()
        return service.import_package(data, authorId)

    # -- runs --------------------------------------------------------------------

    @app.post("/runs", status_code=201)
    def start_run(body: StartRunBody):
        return service.start_run(body.compositionId, body.userId)

    @app.post("/runs/{run_id}/outcome")
    def submit_outcome(run_id: str, body: OutcomeBody):
        return service.submit_run_outcome(run_id, body.model_dump())

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return service.get_run(run_id)

    # -- reviews ------------------------------------------------------------------

    @app.get("/reviews/due")
    def reviews_due(userId: str, today: Optional[str] = None):
        when = date.fromisoformat(today) if today else None
        return {"due": service.reviews_due(userId, when)}

    @app.post("/reviews/{item_id}")
    def apply_review(item_id: str, body: ReviewBody):
        when = date.fromisoformat(body.today) if body.today else None
        return service.apply_review(item_id, body.grade, when)

    # -- chat and conditions ---------------------------------------------------------

    @app.get("/chat/templates")
    def chat_templates():
        return service.chat_templates()

    @app.post("/chat", status_code=201)
    def send_chat(body: ChatBody):
        return service.send_chat(body.fromUser, body.toUser, body.templateId, body.slots)

    @app.get("/chat/{user_id}")
    def inbox(user_id: str, locale: Optional[str] = None):
        return {"messages": service.inbox(user_id, locale)}

    @app.post("/conditions/parse")
    def parse_condition(body: ConditionBody):
        condition = conditions.parse(body.source)
        return {"ok": True, "canonical": conditions.unparse(condition)}

    return app
