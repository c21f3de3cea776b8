"""Command-line surface for the toolkit.

Every command reads and writes UTF-8, exits 0 on success, 1 on runtime
failure and 2 on usage/config errors, and prints a single-line diagnostic
to stderr on failure. Commands that produce an artifact also write a
``<artifact>.manifest.json`` recording the resolved arguments, input file
fingerprints, toolkit version and duration, so identical inputs are
auditable as identical runs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .corpus import (
    gen_inventories,
    gen_synthetic_corpus,
    merge_counts_with_gold,
    project_corpus,
    read_annotation_file,
    read_gold_file,
    read_plain_corpus,
    write_gold_file,
)
from .bpe import Vocabulary, train_bpe
from .errors import ConfigError, FormatError, ModelLoadError, MovocError
from .metrics import evaluate
from .pretok import DEFAULT_POLICY, load_policy, normalize, pretokenize
from .segmenter import (
    build_model,
    decode,
    encode_text,
    load_model,
    save_model,
    train_constrained,
)
from .vocab import (
    LanguageSpec,
    MoVoCConfig,
    build_movoc_vocab,
    compute_budgets,
    extract_morphemes,
    vocab_sizes,
)


@dataclass
class RunManifest:
    command: str
    arguments: dict
    inputs: dict[str, str]
    toolkit_version: str
    duration_s: float

    def write(self, artifact: Path) -> None:
        doc = {
            "command": self.command,
            "arguments": self.arguments,
            "inputs": self.inputs,
            "toolkit_version": self.toolkit_version,
            "duration_s": round(self.duration_s, 6),
        }
        path = artifact.with_name(artifact.name + ".manifest.json")
        path.write_text(
            json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n",
            encoding="utf-8",
        )


def _fingerprint(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _require_file(value: str | None, flag: str) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    if not path.is_file():
        raise ConfigError(f"{flag}: no such file: {path}")
    return path


class _Run:
    """Tracks inputs and timing for the manifest of one command."""

    def __init__(self, args: argparse.Namespace):
        self.command = args.command
        self.arguments = {
            k: v for k, v in vars(args).items() if k not in ("func", "command")
        }
        self.inputs: dict[str, str] = {}
        self.started = time.monotonic()

    def input_file(self, value: str | None, flag: str) -> Path | None:
        path = _require_file(value, flag)
        if path is not None:
            self.inputs[str(path)] = _fingerprint(path)
        return path

    def manifest(self) -> RunManifest:
        return RunManifest(
            self.command,
            self.arguments,
            self.inputs,
            __version__,
            time.monotonic() - self.started,
        )


def _policy(run: _Run, args):
    path = run.input_file(getattr(args, "policy", None), "--policy")
    return load_policy(path) if path else DEFAULT_POLICY


def _open_in(run: _Run, args):
    value = getattr(args, "infile", None)
    if value:
        return open(str(run.input_file(value, "--in")), "rb")
    return nullcontext(sys.stdin)


def _open_out(args):
    value = getattr(args, "out", None)
    if value:
        return open(value, "w", encoding="utf-8")
    return nullcontext(sys.stdout)


def _finish_out(run: _Run, args) -> None:
    if getattr(args, "out", None):
        run.manifest().write(Path(args.out))


def _as_text(line: str | bytes) -> str:
    return line.decode("utf-8") if isinstance(line, bytes) else line


def _read_counts(path: Path, policy, language: str = "und"):
    with open(path, "rb") as fh:
        return read_plain_corpus(fh, policy, language)


def _read_gold(path: Path, language: str = "und"):
    with open(path, "rb") as fh:
        return read_gold_file(fh, language)


def cmd_normalize(args) -> int:
    run = _Run(args)
    policy = _policy(run, args)
    with _open_in(run, args) as source, _open_out(args) as sink:
        for line in source:
            sink.write(normalize(_as_text(line), policy).text + "\n")
    _finish_out(run, args)
    return 0


def cmd_pretokenize(args) -> int:
    run = _Run(args)
    policy = _policy(run, args)
    with _open_in(run, args) as source, _open_out(args) as sink:
        for line in source:
            tokens = pretokenize(normalize(_as_text(line), policy), policy)
            if args.json:
                sink.write(
                    json.dumps(
                        [
                            {"text": t.text, "kind": t.kind, "span": list(t.span)}
                            for t in tokens
                        ],
                        ensure_ascii=False,
                    )
                    + "\n"
                )
            else:
                sink.write(" ".join(t.text for t in tokens) + "\n")
    _finish_out(run, args)
    return 0


def cmd_train_bpe(args) -> int:
    run = _Run(args)
    policy = _policy(run, args)
    corpus_path = run.input_file(args.corpus, "--corpus")
    counts = _read_counts(corpus_path, policy, args.language)
    vocab, merges = train_bpe(counts, args.vocab_size)
    model = build_model(
        vocab,
        merges,
        mode="plain_bpe",
        fallback=args.fallback,
        metadata={"corpus_fingerprints": run.inputs},
    )
    out = Path(args.out)
    save_model(model, str(out))
    run.manifest().write(out)
    return 0


def cmd_extract_morphemes(args) -> int:
    run = _Run(args)
    if bool(args.segmented) == bool(args.annotations):
        raise ConfigError("exactly one of --segmented or --annotations is required")
    if args.segmented:
        corpus = _read_gold(run.input_file(args.segmented, "--segmented"), args.language)
        morphemes = extract_morphemes(corpus, args.top_k)
    else:
        path = run.input_file(args.annotations, "--annotations")
        with open(path, "rb") as fh:
            analyses = read_annotation_file(fh)
        morphemes = extract_morphemes(((a, 1) for a in analyses), args.top_k)
    if args.out:
        doc = {
            "language": args.language,
            "entries": [[m, f] for m, f in morphemes.entries],
        }
        out = Path(args.out)
        out.write_text(
            json.dumps(doc, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
        )
        run.manifest().write(out)
    else:
        for morph, freq in morphemes.entries:
            sys.stdout.write(f"{morph}\t{freq}\n")
    return 0


def _parse_lang_arg(value: str) -> LanguageSpec:
    # tag=plain.txt:segmented.tsv ; the plain part may be empty
    if "=" not in value:
        raise ConfigError(f"--lang {value!r}: expected tag=plain.txt:segmented.tsv")
    tag, _, files = value.partition("=")
    plain, sep, segmented = files.partition(":")
    if not tag:
        raise ConfigError(f"--lang {value!r}: empty language tag")
    if not sep:
        plain, segmented = files, ""
    return LanguageSpec(tag, plain or None, segmented or None)


def _build_vocab(run: _Run, policy, size: int, ratio: float, specs: list[LanguageSpec]):
    config = MoVoCConfig(size, ratio, tuple(specs))
    budgets = compute_budgets(config)
    bpe_vocabs, morpheme_lists, golds = [], [], []
    for spec, budget in zip(specs, budgets):
        if not spec.segmented:
            raise ConfigError(f"language {spec.tag}: a segmented corpus is required")
        gold = _read_gold(run.input_file(spec.segmented, f"--lang {spec.tag}"), spec.tag)
        golds.append(gold)
        if spec.plain:
            counts = _read_counts(
                run.input_file(spec.plain, f"--lang {spec.tag}"), policy, spec.tag
            )
        else:
            counts = gold.word_counts()
        alphabet = {ch for word in counts.counts for ch in word}
        vocab, merges = train_bpe(counts, len(alphabet) + budget.s_bpe)
        bpe_vocabs.append(vocab)
        morpheme_lists.append(extract_morphemes(gold, budget.s_morpheme))
    merged = build_movoc_vocab(config, bpe_vocabs, morpheme_lists)
    sizes = vocab_sizes(bpe_vocabs, morpheme_lists, merged)
    return config, merged, morpheme_lists, golds, sizes


def _write_vocab_artifact(out: Path, merged, config, sizes) -> None:
    doc = {
        "version": 1,
        "kind": "vocabulary",
        "size": config.size,
        "ratio": config.ratio,
        "languages": [spec.tag for spec in config.languages],
        "sizes": sizes,
        "vocab": [
            {"token": e.token, "id": e.id, "provenance": e.provenance, "lang": e.language}
            for e in merged
        ],
    }
    out.write_text(
        json.dumps(doc, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )


def cmd_build_vocab(args) -> int:
    run = _Run(args)
    policy = _policy(run, args)
    specs = [_parse_lang_arg(v) for v in args.lang]
    config, merged, _, _, sizes = _build_vocab(run, policy, args.size, args.ratio, specs)
    out = Path(args.out)
    _write_vocab_artifact(out, merged, config, sizes)
    run.manifest().write(out)
    return 0


def _load_vocab_artifact(path: Path) -> Vocabulary:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"vocabulary file {path}: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("vocab"), list):
        raise ModelLoadError(f"vocabulary file {path}: missing 'vocab' array")
    vocab = Vocabulary()
    for row in doc["vocab"]:
        vocab.add(row["token"], row["provenance"], row.get("lang"))
    return vocab


def cmd_train(args) -> int:
    run = _Run(args)
    policy = _policy(run, args)
    if args.mode == "bpe":
        if not (args.corpus or args.segmented):
            raise ConfigError("--corpus or --segmented is required")
        if args.corpus:
            counts = _read_counts(
                run.input_file(args.corpus, "--corpus"), policy, args.language
            )
        else:
            counts = _read_gold(
                run.input_file(args.segmented, "--segmented"), args.language
            ).word_counts()
        alphabet = {ch for word in counts.counts for ch in word}
        vocab, merges = train_bpe(counts, len(alphabet) + args.merges)
        model = build_model(
            vocab,
            merges,
            mode="plain_bpe",
            fallback=args.fallback,
            metadata={"corpus_fingerprints": run.inputs},
        )
    else:
        if not args.segmented:
            raise ConfigError("--segmented is required in movoc mode")
        gold = _read_gold(run.input_file(args.segmented, "--segmented"), args.language)
        if args.corpus:
            counts = _read_counts(
                run.input_file(args.corpus, "--corpus"), policy, args.language
            )
            training = merge_counts_with_gold(counts, gold)
        else:
            training = gold
        seed_vocab = None
        if args.vocab:
            seed_vocab = _load_vocab_artifact(run.input_file(args.vocab, "--vocab"))
        model = train_constrained(
            training,
            seed_vocab,
            args.merges,
            fallback=args.fallback,
            metadata={"corpus_fingerprints": run.inputs},
        )
    out = Path(args.out)
    save_model(model, str(out))
    run.manifest().write(out)
    return 0


def cmd_encode(args) -> int:
    run = _Run(args)
    policy = _policy(run, args)
    model = load_model(str(run.input_file(args.model, "--model")))
    mode = "ids" if args.ids else "offsets" if args.offsets else "tokens"
    with _open_in(run, args) as source, _open_out(args) as sink:
        for line in source:
            text = normalize(_as_text(line), policy)
            encodings = encode_text(model, text, policy)
            if mode == "ids":
                sink.write(
                    ",".join(str(i) for enc in encodings for i in enc.token_ids) + "\n"
                )
            elif mode == "offsets":
                bases = [t.span[0] for t in pretokenize(text, policy)]
                pieces = [
                    f"{base + start}:{base + end}"
                    for enc, base in zip(encodings, bases)
                    for start, end in enc.spans
                ]
                sink.write(" ".join(pieces) + "\n")
            else:
                sink.write(" ".join(t for enc in encodings for t in enc.tokens) + "\n")
    _finish_out(run, args)
    return 0


def cmd_decode(args) -> int:
    run = _Run(args)
    model = load_model(str(run.input_file(args.model, "--model")))
    with _open_in(run, args) as source, _open_out(args) as sink:
        for line in source:
            text = _as_text(line).strip()
            ids = [int(v) for v in text.replace(",", " ").split()] if text else []
            sink.write(decode(model, ids) + "\n")
    _finish_out(run, args)
    return 0


def _evaluate(run: _Run, args, model_path: str):
    policy = _policy(run, args)
    model = load_model(str(run.input_file(model_path, "--model")))
    gold_path = run.input_file(args.gold, "--gold")
    if gold_path.suffix == ".jsonl":
        with open(gold_path, "rb") as fh:
            analyses = read_annotation_file(fh)
        gold, dropped = project_corpus(analyses)
    else:
        gold = _read_gold(gold_path)
        dropped = 0
    raw_lines = None
    if args.text:
        text_path = run.input_file(args.text, "--text")
        raw_lines = text_path.read_text(encoding="utf-8").splitlines()
    return evaluate(
        model,
        gold,
        raw_lines,
        alpha=args.alpha,
        strict_morph=args.strict,
        average="macro" if args.macro else "micro",
        excluded_nonprojectable=dropped,
    )


def _report_table(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, float):
            value = f"{value:.6f}"
        lines.append(f"{key:32} {value}")
    return "\n".join(lines)


def cmd_eval(args) -> int:
    run = _Run(args)
    report = _evaluate(run, args, args.model).to_dict()
    with _open_out(args) as sink:
        if args.json:
            sink.write(json.dumps(report, ensure_ascii=False) + "\n")
        else:
            sink.write(_report_table(report) + "\n")
    _finish_out(run, args)
    return 0


def cmd_compare(args) -> int:
    run = _Run(args)
    report_a = _evaluate(run, args, args.model_a).to_dict()
    report_b = _evaluate(run, args, args.model_b).to_dict()
    delta = {}
    for key in report_a:
        a, b = report_a[key], report_b[key]
        if isinstance(a, (int, float)) and isinstance(b, (int, float)):
            delta[key] = b - a
        else:
            delta[key] = None
    with _open_out(args) as sink:
        if args.json:
            doc = {"model_a": report_a, "model_b": report_b, "delta": delta}
            sink.write(json.dumps(doc, ensure_ascii=False) + "\n")
        else:
            width = max(len(k) for k in report_a)
            sink.write(
                f"{'metric':<{width}} {'model_a':>14} {'model_b':>14} {'delta':>14}\n"
            )
            for key in report_a:
                cells = []
                for value in (report_a[key], report_b[key], delta[key]):
                    if isinstance(value, float):
                        cells.append(f"{value:>14.6f}")
                    else:
                        cells.append(f"{str(value):>14}")
                sink.write(f"{key:<{width}} {cells[0]} {cells[1]} {cells[2]}\n")
    _finish_out(run, args)
    return 0


def cmd_pipeline(args) -> int:
    run = _Run(args)
    config_path = run.input_file(args.config, "--config")
    try:
        doc = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {config_path}: {exc}") from exc
    for key in ("size", "ratio", "merges", "languages"):
        if key not in doc:
            raise ConfigError(f"config file {config_path}: missing key {key!r}")
    policy = _policy(run, args)
    try:
        specs = [
            LanguageSpec(lang["tag"], lang.get("plain"), lang.get("segmented"))
            for lang in doc["languages"]
        ]
    except (TypeError, KeyError) as exc:
        raise ConfigError(
            f"config file {config_path}: each language needs a 'tag' ({exc})"
        ) from exc
    config, merged, morpheme_lists, golds, sizes = _build_vocab(
        run, policy, doc["size"], doc["ratio"], specs
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    vocab_path = out_dir / "vocab.json"
    _write_vocab_artifact(vocab_path, merged, config, sizes)
    run.manifest().write(vocab_path)

    training = golds[0]
    for extra in golds[1:]:
        training = merge_counts_with_gold(training.word_counts(), extra)
    lexicon = {m for ml in morpheme_lists for m in ml.strings()}
    model = train_constrained(
        training,
        merged,
        doc["merges"],
        lexicon=lexicon,
        fallback=doc.get("fallback", "unk"),
        metadata={"corpus_fingerprints": run.inputs, "vocab_sizes": sizes},
    )
    model_path = out_dir / "model.json"
    save_model(model, str(model_path))
    run.manifest().write(model_path)
    sys.stdout.write(f"wrote {vocab_path} and {model_path}\n")
    return 0


def cmd_gen_synthetic(args) -> int:
    run = _Run(args)
    inventories = gen_inventories(args.seed, (args.prefixes, args.stems, args.suffixes))
    corpus = gen_synthetic_corpus(args.seed, args.n_words, inventories)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        write_gold_file(corpus, fh)
    run.manifest().write(out)
    if args.text_out:
        text_path = Path(args.text_out)
        with open(text_path, "w", encoding="utf-8") as fh:
            for seg, count in corpus.entries:
                for _ in range(count):
                    fh.write(seg.surface + "\n")
        run.manifest().write(text_path)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    preload = {}
    for value in args.model or []:
        name, _, path = value.rpartition("=")
        path_obj = _require_file(path, "--model")
        preload[name or path_obj.stem] = str(path_obj)
    app = create_app(preload)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="movoc",
        description="Morpheme-aware subword tokenization toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        return p

    io_opts = argparse.ArgumentParser(add_help=False)
    io_opts.add_argument("--in", dest="infile", help="input file (default: stdin)")
    io_opts.add_argument("--out", help="output file (default: stdout)")
    policy_opt = argparse.ArgumentParser(add_help=False)
    policy_opt.add_argument("--policy", help="normalization policy JSON file")

    add("normalize", cmd_normalize, parents=[io_opts, policy_opt],
        help="normalize text lines")

    p = add("pretokenize", cmd_pretokenize, parents=[io_opts, policy_opt],
            help="split normalized lines into pre-tokens")
    p.add_argument("--json", action="store_true", help="emit pre-tokens as JSON")

    p = add("train-bpe", cmd_train_bpe, parents=[policy_opt],
            help="train a plain BPE tokenizer model")
    p.add_argument("--corpus", required=True, help="plain text corpus")
    p.add_argument("--vocab-size", type=int, required=True,
                   help="total vocabulary size incl. seed characters")
    p.add_argument("--language", default="und")
    p.add_argument("--fallback", choices=["unk", "char_passthrough"], default="unk")
    p.add_argument("--out", required=True, help="model JSON output path")

    p = add("extract-morphemes", cmd_extract_morphemes,
            help="rank morphemes of a segmented or annotated corpus")
    p.add_argument("--segmented", help="gold segmentation TSV")
    p.add_argument("--annotations", help="JSONL role annotations")
    p.add_argument("--top-k", type=int, required=True)
    p.add_argument("--language", default="und")
    p.add_argument("--out", help="JSON output path (default: TSV to stdout)")

    p = add("build-vocab", cmd_build_vocab, parents=[policy_opt],
            help="construct the hybrid morpheme+BPE vocabulary")
    p.add_argument("--size", type=int, required=True, help="total budget")
    p.add_argument("--ratio", type=float, required=True,
                   help="morpheme share in [0, 1]")
    p.add_argument("--lang", action="append", required=True,
                   metavar="TAG=PLAIN:SEGMENTED", help="language spec; repeatable")
    p.add_argument("--out", required=True, help="vocabulary JSON output path")

    p = add("train", cmd_train, parents=[policy_opt], help="train a tokenizer model")
    p.add_argument("--mode", choices=["movoc", "bpe"], required=True)
    p.add_argument("--corpus", help="plain text corpus")
    p.add_argument("--segmented", help="gold segmentation TSV")
    p.add_argument("--merges", type=int, required=True)
    p.add_argument("--vocab", help="vocabulary JSON from build-vocab")
    p.add_argument("--language", default="und")
    p.add_argument("--fallback", choices=["unk", "char_passthrough"], default="unk")
    p.add_argument("--out", required=True, help="model JSON output path")

    p = add("encode", cmd_encode, parents=[io_opts, policy_opt],
            help="encode text lines from stdin")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--tokens", action="store_true",
                       help="space-separated tokens (default)")
    group.add_argument("--ids", action="store_true", help="comma-separated ids")
    group.add_argument("--offsets", action="store_true",
                       help="start:end spans in the normalized line")

    p = add("decode", cmd_decode, parents=[io_opts], help="decode id lines from stdin")
    p.add_argument("--model", required=True)

    eval_opts = argparse.ArgumentParser(add_help=False)
    eval_opts.add_argument("--gold", required=True,
                           help="gold TSV or .jsonl annotations")
    eval_opts.add_argument("--text", help="raw corpus for token statistics")
    eval_opts.add_argument("--alpha", type=float, default=2.0)
    eval_opts.add_argument("--strict", action="store_true",
                           help="all-or-nothing per-word scoring")
    eval_opts.add_argument("--macro", action="store_true",
                           help="macro-average boundary precision")
    eval_opts.add_argument("--json", action="store_true")
    eval_opts.add_argument("--out", help="output file (default: stdout)")

    p = add("eval", cmd_eval, parents=[eval_opts, policy_opt],
            help="evaluate a model against gold segmentations")
    p.add_argument("--model", required=True)

    p = add("compare", cmd_compare, parents=[eval_opts, policy_opt],
            help="evaluate two models side by side")
    p.add_argument("--model-a", required=True)
    p.add_argument("--model-b", required=True)

    p = add("pipeline", cmd_pipeline, parents=[policy_opt],
            help="run vocabulary construction and training end to end")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("--out", required=True, help="output directory")

    p = add("gen-synthetic", cmd_gen_synthetic,
            help="generate a deterministic synthetic segmented corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n-words", type=int, required=True)
    p.add_argument("--prefixes", type=int, default=10)
    p.add_argument("--stems", type=int, default=50)
    p.add_argument("--suffixes", type=int, default=10)
    p.add_argument("--out", required=True, help="gold TSV output path")
    p.add_argument("--text-out", help="also write the surfaces as a plain corpus")

    p = add("serve", cmd_serve, help="run the HTTP tokenization service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--model", action="append", metavar="[NAME=]PATH",
                   help="preload a model; repeatable")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"movoc {args.command}: {exc}", file=sys.stderr)
        return 2
    except (FormatError, ModelLoadError, MovocError, ValueError, OSError) as exc:
        print(f"movoc {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
