"""HTTP surface for the session service. JSON bodies in, canonical report JSON out."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .report import report_to_dict
from .service import (
    CooldownActive,
    GateClosed,
    InvalidSource,
    NotVisible,
    PipelineError,
    StyleFeedbackService,
    UnknownReport,
    UnknownSession,
)


class FeedbackRequest(BaseModel):
    source: str
    tests_passed: bool


class RatingRequest(BaseModel):
    helpful: bool


def create_app(service: StyleFeedbackService) -> FastAPI:
    app = FastAPI(title="stylefeed", docs_url=None, redoc_url=None)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions/{student_id}/problems/{problem_id}/feedback")
    def request_feedback(student_id: str, problem_id: str, body: FeedbackRequest):
        try:
            stored = service.request_style_feedback(
                student_id, problem_id, body.source, body.tests_passed)
        except GateClosed as exc:
            raise HTTPException(status_code=403, detail={"error": "gate_closed",
                                                         "message": str(exc)})
        except CooldownActive as exc:
            raise HTTPException(status_code=429, detail={
                "error": "cooldown_active",
                "remaining_seconds": exc.remaining_seconds,
            })
        except InvalidSource as exc:
            raise HTTPException(status_code=400, detail={"error": "invalid_source",
                                                         "message": str(exc)})
        except PipelineError as exc:
            raise HTTPException(status_code=500, detail={"error": "pipeline_error",
                                                         "message": str(exc)})
        now = service.clock.now()
        visible_now = stored.visible_from <= now
        return {
            "report_id": stored.report_id,
            "visible_from": stored.visible_from.isoformat(),
            "visible_now": visible_now,
            "report": report_to_dict(stored.report) if visible_now else None,
        }

    @app.get("/sessions/{student_id}/problems/{problem_id}/reports")
    def list_reports(student_id: str, problem_id: str):
        try:
            visible, nudge, pending = service.get_visible_reports(student_id, problem_id)
        except UnknownSession:
            raise HTTPException(status_code=404, detail={"error": "unknown_session"})
        return {
            "reports": [
                {
                    "report_id": stored.report_id,
                    "visible_from": stored.visible_from.isoformat(),
                    "report": report_to_dict(stored.report),
                }
                for stored in visible
            ],
            "nudge": nudge,
            "pending_release": pending.isoformat() if pending else None,
        }

    @app.post("/reports/{report_id:path}/view")
    def record_view(report_id: str):
        try:
            owner = service.report_owner(report_id)
            service.record_view(owner, report_id)
        except UnknownReport:
            raise HTTPException(status_code=404, detail={"error": "unknown_report"})
        except NotVisible:
            raise HTTPException(status_code=403, detail={"error": "not_visible"})
        return {"ok": True}

    @app.post("/reports/{report_id:path}/rating")
    def record_rating(report_id: str, body: RatingRequest):
        try:
            owner = service.report_owner(report_id)
            service.record_rating(owner, report_id, body.helpful)
        except UnknownReport:
            raise HTTPException(status_code=404, detail={"error": "unknown_report"})
        except NotVisible:
            raise HTTPException(status_code=403, detail={"error": "not_visible"})
        return {"ok": True}

    return app
