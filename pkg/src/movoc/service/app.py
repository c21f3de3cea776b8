"""FastAPI service wrapping the tokenization library.

Models are loaded once into an in-process registry and served to any
number of clients; encode/decode/evaluate/train mirror the CLI commands
of the same names, token for token.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bpe import train_bpe
from ..corpus import (
    merge_counts_with_gold,
    project_corpus,
    read_annotation_file,
    read_gold_file,
    read_plain_corpus,
)
from ..errors import MovocError
from ..metrics import evaluate
from ..pretok import DEFAULT_POLICY
from ..segmenter import (
    TokenizerModel,
    build_model,
    decode,
    encode_text,
    load_model,
    save_model,
    train_constrained,
)
from .schemas import (
    DecodeRequest,
    DecodeResponse,
    EncodeRequest,
    EncodeResponse,
    EvaluateRequest,
    HealthResponse,
    LineEncoding,
    LoadModelRequest,
    MetricReportModel,
    ModelInfo,
    ModelListResponse,
    TrainRequest,
)


def _info(model_id: str, model: TokenizerModel) -> ModelInfo:
    return ModelInfo(
        model_id=model_id,
        mode=model.mode,
        fallback=model.fallback,
        vocab_size=len(model.vocabulary),
        merge_count=len(model.merges),
        lexicon_size=len(model.lexicon),
    )


def create_app(preload: dict[str, str] | None = None) -> FastAPI:
    app = FastAPI(title="movoc", version=__version__)
    registry: dict[str, TokenizerModel] = {}
    app.state.models = registry
    for model_id, path in (preload or {}).items():
        registry[model_id] = load_model(path)

    def get_model(model_id: str) -> TokenizerModel:
        model = registry.get(model_id)
        if model is None:
            raise HTTPException(404, f"unknown model_id {model_id!r}")
        return model

    def require_file(path: str, what: str) -> Path:
        p = Path(path)
        if not p.is_file():
            raise HTTPException(400, f"{what}: no such file: {path}")
        return p

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.get("/models", response_model=ModelListResponse)
    def list_models():
        return ModelListResponse(
            models=[_info(mid, m) for mid, m in sorted(registry.items())]
        )

    @app.post("/models", response_model=ModelInfo)
    def load(req: LoadModelRequest):
        path = require_file(req.path, "path")
        try:
            model = load_model(str(path))
        except MovocError as exc:
            raise HTTPException(400, str(exc)) from exc
        model_id = req.model_id or path.stem
        registry[model_id] = model
        return _info(model_id, model)

    @app.post("/encode", response_model=EncodeResponse)
    def encode_lines(req: EncodeRequest):
        model = get_model(req.model_id)
        out = []
        for line in req.lines:
            encodings = encode_text(model, line, DEFAULT_POLICY)
            out.append(
                LineEncoding(
                    tokens=[t for enc in encodings for t in enc.tokens],
                    ids=[i for enc in encodings for i in enc.token_ids],
                    offsets=[s for enc in encodings for s in enc.spans],
                )
            )
        return EncodeResponse(lines=out)

    @app.post("/decode", response_model=DecodeResponse)
    def decode_ids(req: DecodeRequest):
        model = get_model(req.model_id)
        try:
            return DecodeResponse(text=decode(model, req.ids))
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc

    @app.post("/evaluate", response_model=MetricReportModel)
    def evaluate_model(req: EvaluateRequest):
        model = get_model(req.model_id)
        gold_path = require_file(req.gold_path, "gold_path")
        try:
            if gold_path.suffix == ".jsonl":
                with open(gold_path, "rb") as fh:
                    gold, dropped = project_corpus(read_annotation_file(fh))
            else:
                with open(gold_path, "rb") as fh:
                    gold = read_gold_file(fh)
                dropped = 0
            raw_lines = None
            if req.text_path:
                text_path = require_file(req.text_path, "text_path")
                raw_lines = text_path.read_text(encoding="utf-8").splitlines()
            report = evaluate(
                model,
                gold,
                raw_lines,
                alpha=req.alpha,
                strict_morph=req.strict,
                average="macro" if req.macro else "micro",
                excluded_nonprojectable=dropped,
            )
        except (MovocError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        return MetricReportModel(**report.to_dict())

    @app.post("/train", response_model=ModelInfo)
    def train(req: TrainRequest):
        try:
            if req.mode == "bpe":
                if not (req.corpus_path or req.segmented_path):
                    raise HTTPException(400, "corpus_path or segmented_path required")
                if req.corpus_path:
                    path = require_file(req.corpus_path, "corpus_path")
                    with open(path, "rb") as fh:
                        counts = read_plain_corpus(fh, DEFAULT_POLICY, req.language)
                else:
                    path = require_file(req.segmented_path, "segmented_path")
                    with open(path, "rb") as fh:
                        counts = read_gold_file(fh, req.language).word_counts()
                alphabet = {ch for word in counts.counts for ch in word}
                vocab, merges = train_bpe(counts, len(alphabet) + req.merges)
                model = build_model(
                    vocab, merges, mode="plain_bpe", fallback=req.fallback
                )
            else:
                if not req.segmented_path:
                    raise HTTPException(400, "segmented_path required in movoc mode")
                path = require_file(req.segmented_path, "segmented_path")
                with open(path, "rb") as fh:
                    gold = read_gold_file(fh, req.language)
                training = gold
                if req.corpus_path:
                    corpus_path = require_file(req.corpus_path, "corpus_path")
                    with open(corpus_path, "rb") as fh:
                        counts = read_plain_corpus(fh, DEFAULT_POLICY, req.language)
                    training = merge_counts_with_gold(counts, gold)
                model = train_constrained(
                    training, None, req.merges, fallback=req.fallback
                )
        except MovocError as exc:
            raise HTTPException(400, str(exc)) from exc
        model_id = req.model_id or f"model-{len(registry) + 1}"
        registry[model_id] = model
        if req.save_path:
            save_model(model, req.save_path)
        return _info(model_id, model)

    return app
