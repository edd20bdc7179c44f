"""paracode command-line interface.

Verbs: ingest, roles, embed, train, evaluate (alias: eval), predict,
shortlist, serve, export. Every artifact-producing verb is deterministic
for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import re
import sys
from pathlib import Path

from . import __version__
from .classifiers import load_bundle
from .config import load_config
from .corpus import (
    Corpus,
    Document,
    Register,
    read_corpus,
    read_label_records,
    write_corpus,
)
from .embedding import embed_corpus, load_vectors, provider_from_string, save_vectors
from .ensemble import read_decisions
from .errors import ConfigError, ParacodeError
from .pipeline import (
    cmd_predict,
    cmd_shortlist,
    cmd_train,
    evaluate_decisions,
    evaluate_role,
    write_evaluation_artifacts,
)
from .store import ReviewStore

log = logging.getLogger("paracode")

_STEM = re.compile(r"^(?P<party>.+)_(?P<year>\d{4})$")


def _load_documents(in_dir: Path) -> list[Document]:
    """Documents from <dir>/*.txt, described by documents.json when present,
    otherwise by PARTY_YEAR.txt filename convention."""
    manifest_path = in_dir / "documents.json"
    documents = []
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        for entry in manifest:
            text_path = in_dir / entry["path"]
            documents.append(
                Document(
                    doc_id=entry["doc_id"],
                    party=entry["party"],
                    year=int(entry["year"]),
                    register=Register(entry.get("register", "manifesto")),
                    source_language=entry.get("source_language", "en"),
                    raw_text=text_path.read_text(encoding="utf-8"),
                )
            )
        return documents

    for text_path in sorted(in_dir.glob("*.txt")):
        match = _STEM.match(text_path.stem)
        if not match:
            raise ConfigError(
                f"{text_path.name}: expected PARTY_YEAR.txt naming or a documents.json manifest"
            )
        documents.append(
            Document(
                doc_id=text_path.stem,
                party=match.group("party"),
                year=int(match.group("year")),
                register=Register.manifesto,
                source_language="en",
                raw_text=text_path.read_text(encoding="utf-8"),
            )
        )
    return documents


def _cmd_ingest(args) -> int:
    in_dir = Path(args.in_dir)
    labels = read_label_records(args.labels) if args.labels else []
    documents = _load_documents(in_dir)
    if not documents:
        raise ConfigError(f"no documents found under {in_dir}")

    corpus = Corpus()
    for document in documents:
        paragraphs = corpus.add_document(document, labels)
        log.info("ingested %s: %d paragraphs", document.doc_id, len(paragraphs))

    matched_ids = corpus.doc_ids
    unmatched = sorted({r.doc_id for r in labels} - matched_ids)
    if unmatched:
        log.warning("label records reference unknown documents: %s", unmatched)

    write_corpus(corpus.paragraphs(), args.out)
    log.info("wrote %d paragraphs to %s", len(corpus), args.out)
    return 0


def _cmd_roles(args) -> int:
    corpus = read_corpus(args.corpus)
    role_map = json.loads(Path(args.map).read_text(encoding="utf-8"))
    counts = corpus.assign_roles(role_map)
    out = args.out or args.corpus
    write_corpus(corpus.paragraphs(), out)
    log.info("role counts: %s", counts)
    print(json.dumps(counts))
    return 0


def _build_provider(args, config):
    if args.provider:
        hashing = config.provider if config.provider.get("kind") == "hashing" else {}
        return provider_from_string(
            args.provider,
            n_features=hashing.get("n_features", 1024),
            seed=hashing.get("seed", 42),
            dim=config.provider.get("dim", 1024),
        )
    return config.build_provider()


def _cmd_embed(args) -> int:
    config = load_config(args.config)
    corpus = read_corpus(args.corpus)
    provider = _build_provider(args, config)
    cache = None
    if args.cache and Path(args.cache).exists():
        cache = load_vectors(args.cache)
    cache = embed_corpus(corpus.paragraphs(), provider, cache)
    save_vectors(cache, args.out)
    log.info("embedded %d paragraphs (dim %d) -> %s", len(cache), cache.dim, args.out)
    return 0


def _cmd_train(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    corpus = read_corpus(args.corpus)
    vectors = load_vectors(args.vectors)
    cmd_train(config, corpus, vectors, args.out)
    log.info("wrote model bundle to %s", args.out)
    return 0


def _cmd_evaluate(args) -> int:
    config = load_config(args.config)
    if args.threshold is not None:
        config = dataclasses.replace(config, threshold=args.threshold)
    corpus = read_corpus(args.corpus)
    if args.decisions:
        decisions, _ = read_decisions(args.decisions)
        by_key = {(d.para_id, d.dimension): d.decision for d in decisions}
        metric_reports, manifesto_reports = evaluate_decisions(corpus, by_key, args.role)
    else:
        if not (args.bundle and args.vectors):
            raise ConfigError("evaluate needs either --decisions or --bundle plus --vectors")
        bundle = load_bundle(args.bundle)
        vectors = load_vectors(args.vectors)
        metric_reports, manifesto_reports = evaluate_role(
            config, bundle, corpus, vectors, args.role
        )
    if args.out_dir:
        paths = write_evaluation_artifacts(
            metric_reports, manifesto_reports, args.out_dir, args.format
        )
        log.info("wrote %s", ", ".join(str(p) for p in paths))
    else:
        from .evaluation import emit_report

        sys.stdout.write(emit_report(metric_reports, args.format))
        sys.stdout.write(emit_report(manifesto_reports, args.format))
    return 0


def _cmd_predict(args) -> int:
    config = load_config(args.config)
    if args.threshold is not None:
        config = dataclasses.replace(config, threshold=args.threshold)
    corpus = read_corpus(args.corpus)
    bundle = load_bundle(args.bundle)
    vectors = load_vectors(args.vectors)
    decisions, _ = cmd_predict(config, bundle, corpus, vectors, args.out)
    flagged = sum(d.decision for d in decisions)
    log.info("wrote %d decisions (%d flagged) to %s", len(decisions), flagged, args.out)
    return 0


def _cmd_shortlist(args) -> int:
    config = load_config(args.config)
    if args.include_near_miss:
        config = dataclasses.replace(config, include_near_miss=True)
    corpus = read_corpus(args.corpus)
    bundle = load_bundle(args.bundle)
    vectors = load_vectors(args.vectors)
    store = ReviewStore(args.store)
    session, queue = cmd_shortlist(
        config, bundle, corpus, vectors, store,
        corpus_path=args.corpus, session_id=args.session_id,
    )
    if args.out:
        with Path(args.out).open("w", encoding="utf-8") as fh:
            for entry in queue:
                fh.write(json.dumps(
                    {k: entry[k] for k in
                     ("para_id", "dimension", "positive_votes", "mean_score", "near_miss")},
                    ensure_ascii=False,
                ) + "\n")
    print(session["session_id"])
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    store = ReviewStore(args.store)
    app = create_app(store, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_export(args) -> int:
    store = ReviewStore(args.store)
    count = store.write_export(args.session, args.out)
    log.info("exported %d rows to %s", count, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paracode",
        description="Paragraph-level populist-content coding pipeline",
    )
    parser.add_argument("--version", action="version", version=f"paracode {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="clean, segment and label raw documents")
    p.add_argument("--in", dest="in_dir", required=True, help="directory of .txt documents")
    p.add_argument("--labels", help="JSONL of {doc_id, index, pc, ae} gold labels")
    p.add_argument("--out", required=True, help="corpus JSONL to write")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("roles", help="assign train/test/holdout roles per document")
    p.add_argument("--corpus", required=True)
    p.add_argument("--map", required=True, help="JSON {doc_id: role}")
    p.add_argument("--out", help="output corpus (default: rewrite --corpus)")
    p.set_defaults(func=_cmd_roles)

    p = sub.add_parser("embed", help="compute paragraph vectors")
    p.add_argument("--corpus", required=True)
    p.add_argument("--provider", help="hashing | file:<path> | http:<url>")
    p.add_argument("--cache", help="existing vector file to reuse")
    p.add_argument("--out", required=True, help="vector file (.pcv) to write")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("train", help="fit the ten models on the train role")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--out", required=True, help="model bundle to write")
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", aliases=["eval"], help="metrics and manifesto reports")
    p.add_argument("--corpus", required=True)
    p.add_argument("--role", required=True, choices=["train", "test", "holdout"])
    p.add_argument("--decisions", help="precomputed decisions JSONL")
    p.add_argument("--bundle", help="model bundle (with --vectors)")
    p.add_argument("--vectors")
    p.add_argument("--threshold", type=int)
    p.add_argument("--format", default="table-text", choices=["table-text", "csv", "json"])
    p.add_argument("--out-dir", help="write artifacts here instead of stdout")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("predict", help="write ensemble decisions for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--threshold", type=int)
    p.add_argument("--out", required=True, help="decisions JSONL to write")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("shortlist", help="rank flagged paragraphs and open a review session")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--store", required=True, help="review store directory")
    p.add_argument("--session-id")
    p.add_argument("--include-near-miss", action="store_true")
    p.add_argument("--out", help="also write the shortlist as JSONL")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_shortlist)

    p = sub.add_parser("serve", help="run the review HTTP service")
    p.add_argument("--store", required=True)
    p.add_argument("--ui", help="directory of built UI assets to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8734)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export", help="write the human-corrected corpus for a session")
    p.add_argument("--store", required=True)
    p.add_argument("--session", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParacodeError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
