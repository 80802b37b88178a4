"""Request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class ErrorInfo(BaseModel):
    kind: str
    message: str
    line: Optional[int] = None
    col: Optional[int] = None


class FailureInfo(BaseModel):
    line: Optional[int] = None
    col: Optional[int] = None
    message: str
    actual: Optional[str] = None
    expected: Optional[str] = None


class ReportInfo(BaseModel):
    total: int
    passed: int
    failures: list[FailureInfo] = Field(default_factory=list)
    summary: str


class RunRequest(BaseModel):
    source: str
    level: Optional[int] = Field(default=None, ge=0, le=4)


class RunResponse(BaseModel):
    ok: bool
    values: list[str] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    report: Optional[ReportInfo] = None
    error: Optional[ErrorInfo] = None


class TraceEvent(BaseModel):
    type: Literal["tick", "key"]
    key: Optional[str] = None


class WorldRequest(BaseModel):
    source: str
    level: Optional[int] = Field(default=None, ge=0, le=4)
    events: list[TraceEvent] = Field(default_factory=list)
    max_frames: Optional[int] = Field(default=None, ge=0)


class FrameInfo(BaseModel):
    seq: int
    scene: dict
    world: str
    svg: str


class WorldResponse(BaseModel):
    ok: bool
    final_world: Optional[str] = None
    frames: list[FrameInfo] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    report: Optional[ReportInfo] = None
    error: Optional[ErrorInfo] = None
