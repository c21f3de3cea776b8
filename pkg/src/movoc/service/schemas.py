"""Pydantic request/response models for the tokenization service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class ModelInfo(BaseModel):
    model_id: str
    mode: str
    fallback: str
    vocab_size: int
    merge_count: int
    lexicon_size: int


class ModelListResponse(BaseModel):
    models: list[ModelInfo]


class LoadModelRequest(BaseModel):
    path: str
    model_id: str | None = None


class EncodeRequest(BaseModel):
    model_id: str
    lines: list[str]


class LineEncoding(BaseModel):
    tokens: list[str]
    ids: list[int]
    offsets: list[tuple[int, int]]


class EncodeResponse(BaseModel):
    lines: list[LineEncoding]


class DecodeRequest(BaseModel):
    model_id: str
    ids: list[int]


class DecodeResponse(BaseModel):
    text: str


class EvaluateRequest(BaseModel):
    model_id: str
    gold_path: str
    text_path: str | None = None
    alpha: float = 2.0
    strict: bool = False
    macro: bool = False


class MetricReportModel(BaseModel):
    morph_score: float | None
    boundary_precision: float | None
    boundary_recall: float | None
    renyi_entropy: float
    alpha: float
    tokens_per_word: float
    words_total: int
    words_unsegmented: int
    words_excluded_nonprojectable: int
    entropy_unit: str


class TrainRequest(BaseModel):
    mode: str = Field(pattern="^(movoc|bpe)$")
    corpus_path: str | None = None
    segmented_path: str | None = None
    merges: int = 0
    fallback: str = "unk"
    language: str = "und"
    model_id: str | None = None
    save_path: str | None = None
