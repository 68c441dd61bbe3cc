"""Command-line entry point: build, annotate, augment, split, eval, stats.

Options come from built-in defaults, then an optional JSON ``--config`` file,
then command-line flags (flags win). Logs are JSON lines on stderr at the
level named by ``RAP_LOG`` (default INFO); results go to stdout as JSON.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, fields

from .dataset import MODES, emit_augmented, load_dataset, sample_split, write_dataset
from .errors import ConfigError, RapError, SchemaMismatch
from .evaluate import evaluate
from .prompt import DEFAULT_SEP, assemble_event_prompt, assemble_relation_prompt, format_input, load_templates
from .retrieval import (
    DEFAULT_B,
    DEFAULT_K1,
    DEFAULT_K_ARGUMENT,
    DEFAULT_K_TRIGGER,
    build_index,
    retrieve_topk,
    write_index_snapshot,
)
from .schema import load_schema
from .store import build_store, extend_store, read_store, store_stats, write_store
from .weak import annotate_corpus, load_lexicon, read_corpus

log = logging.getLogger("rap")


@dataclass
class PipelineConfig:
    schema: str | None = None
    store: str | None = None
    corpus: str | None = None
    lexicon: str | None = None
    dataset: str | None = None
    mode: str = "event"
    k: int | None = None
    focus: str = "trigger"
    bm25_k1: float = DEFAULT_K1
    bm25_b: float = DEFAULT_B
    seed: int = 0
    fraction: float = 1.0
    independent: bool = False
    sep: str = DEFAULT_SEP
    budget: int | None = None
    templates: str | None = None
    with_labels: bool = False
    self_exclude: bool = True
    index: str | None = None
    out: str | None = None
    gold: str | None = None
    pred: str | None = None
    require_trigger: bool = False

    @property
    def effective_k(self) -> int:
        if self.k is not None:
            return self.k
        return DEFAULT_K_ARGUMENT if self.focus == "argument" else DEFAULT_K_TRIGGER

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.focus not in ("trigger", "argument"):
            raise ConfigError(f"focus must be 'trigger' or 'argument', got {self.focus!r}")
        if self.k is not None and (isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1):
            raise ConfigError(f"k must be an integer >= 1, got {self.k!r}")
        if not (0.0 < self.fraction <= 1.0):
            raise ConfigError(f"fraction must be in (0, 1], got {self.fraction!r}")
        if self.budget is not None and self.budget < 0:
            raise ConfigError("budget must be non-negative")
        if not self.sep.strip():
            raise ConfigError("separator must not be blank")

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(PipelineConfig)}
    out = {}
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"{path}: unknown config key {key!r}")
        out[name] = value
    return out


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(load_config(args.config))
    for f in fields(PipelineConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = PipelineConfig(**values)
    cfg.validate()
    return cfg


class JsonLogFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {"level": record.levelname, "logger": record.name, "msg": record.getMessage()}
        event = getattr(record, "event", None)
        if event:
            payload.update(event)
        return json.dumps(payload, ensure_ascii=False, sort_keys=True)


def setup_logging() -> None:
    level = os.environ.get("RAP_LOG", "INFO").upper()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonLogFormatter())
    root = logging.getLogger("rap")
    root.handlers[:] = [handler]
    root.setLevel(getattr(logging, level, logging.INFO))
    root.propagate = False


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, sort_keys=True))


def cmd_build(cfg: PipelineConfig) -> int:
    cfg.require("schema", "dataset", "store")
    g = load_schema(cfg.schema)
    records = load_dataset(cfg.dataset, cfg.mode)
    store = build_store(records, g)
    idx = build_index(store, cfg.bm25_k1, cfg.bm25_b)
    write_store(store, cfg.store)
    index_path = cfg.index or cfg.out or f"{cfg.store}.index.json"
    write_index_snapshot(idx, index_path)
    log.info("store built", extra={"event": {"entries": len(store), "store": cfg.store, "index": index_path}})
    _emit(store_stats(store))
    return 0


def cmd_annotate(cfg: PipelineConfig) -> int:
    cfg.require("schema", "store", "corpus", "lexicon")
    g = load_schema(cfg.schema)
    store = read_store(cfg.store)
    lex = load_lexicon(cfg.lexicon)
    corpus = read_corpus(cfg.corpus)
    weak = annotate_corpus(corpus, lex, g)
    extended, report = extend_store(store, weak, g)
    target = cfg.out or cfg.store
    write_store(extended, target)
    log.info("store extended", extra={"event": {"sentences": len(corpus), "weak": len(weak), "store": target}})
    _emit({"rejections": report.to_json(), "stats": store_stats(extended)})
    return 0


def cmd_augment(cfg: PipelineConfig) -> int:
    cfg.require("schema", "store", "dataset", "out")
    g = load_schema(cfg.schema)
    store = read_store(cfg.store)
    if store.schema_id != g.content_hash():
        raise SchemaMismatch(f"{cfg.store} was built against a different schema than {cfg.schema}")
    templates = load_templates(cfg.templates) if cfg.templates else None
    records = load_dataset(cfg.dataset, cfg.mode)
    idx = build_index(store, cfg.bm25_k1, cfg.bm25_b)
    k = cfg.effective_k
    bundles = []
    for rec in records:
        try:
            hits = retrieve_topk(idx, rec.text, k, exclude_origin=rec.id if cfg.self_exclude else None)
            if cfg.mode == "event":
                prompt = assemble_event_prompt(hits, store, g, cfg.seed * 1_000_003 + rec.id, templates, cfg.with_labels)
            else:
                prompt = assemble_relation_prompt(hits, store, g, templates, cfg.with_labels)
            bundles.append(format_input(rec.text, prompt, cfg.sep, cfg.budget))
        except RapError as exc:
            raise RapError(f"record {rec.id}: {exc}") from exc
    n = emit_augmented(records, bundles, cfg.out)
    empty = sum(1 for b in bundles if not b.retrieved_ids)
    log.info("augmented", extra={"event": {"records": n, "k": k, "without_references": empty, "out": cfg.out}})
    _emit({"records": n, "k": k, "without_references": empty, "out": cfg.out})
    return 0


def cmd_split(cfg: PipelineConfig) -> int:
    cfg.require("dataset", "out")
    records = load_dataset(cfg.dataset, cfg.mode)
    subset = sample_split(records, cfg.fraction, cfg.seed, nested=not cfg.independent)
    write_dataset(subset, cfg.out)
    _emit({"records": len(records), "selected": len(subset), "fraction": cfg.fraction, "seed": cfg.seed, "out": cfg.out})
    return 0


def cmd_eval(cfg: PipelineConfig) -> int:
    cfg.require("gold", "pred")
    gold = load_dataset(cfg.gold, cfg.mode)
    pred = load_dataset(cfg.pred, cfg.mode)
    reports = evaluate(gold, pred, cfg.mode, cfg.require_trigger)
    _emit({name: r.to_json() for name, r in reports.items()})
    return 0


def cmd_stats(cfg: PipelineConfig) -> int:
    cfg.require("store")
    _emit(store_stats(read_store(cfg.store)))
    return 0


COMMANDS = {
    "build": cmd_build,
    "annotate": cmd_annotate,
    "augment": cmd_augment,
    "split": cmd_split,
    "eval": cmd_eval,
    "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults")
    common.add_argument("--schema")
    common.add_argument("--store")
    common.add_argument("--dataset")
    common.add_argument("--corpus")
    common.add_argument("--lexicon")
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--k", type=int)
    common.add_argument("--focus", choices=("trigger", "argument"), help="picks the default k (2 or 8)")
    common.add_argument("--bm25-k1", dest="bm25_k1", type=float)
    common.add_argument("--bm25-b", dest="bm25_b", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--fraction", type=float)
    common.add_argument("--independent", action="store_const", const=True, help="draw splits independently per fraction")
    common.add_argument("--sep")
    common.add_argument("--budget", type=int, help="max whitespace tokens per formatted input")
    common.add_argument("--templates")
    common.add_argument("--with-labels", dest="with_labels", action="store_const", const=True)
    common.add_argument("--no-self-exclude", dest="self_exclude", action="store_const", const=False)
    common.add_argument("--index", help="index snapshot path (build)")
    common.add_argument("--out")
    common.add_argument("--gold")
    common.add_argument("--pred")
    common.add_argument("--require-trigger", dest="require_trigger", action="store_const", const=True)

    parser = argparse.ArgumentParser(prog="rap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "build": "build the reference store and index snapshot from a training set",
        "annotate": "weakly label a corpus and append it to the store",
        "augment": "retrieve references and write prompt-augmented inputs",
        "split": "sample a deterministic low-resource subset",
        "eval": "score predictions against gold",
        "stats": "print store statistics",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (RapError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"rap {args.command}: error: {exc}", file=sys.stderr)
        log.debug("failure", extra={"event": {"type": type(exc).__name__}})
        return 1


if __name__ == "__main__":
    sys.exit(main())
