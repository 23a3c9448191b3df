"""Command-line interface: ingest, build artifacts, train models, suggest,
evaluate, and serve."""

from __future__ import annotations

import argparse
import json
import sys

from .config import EngineConfig, load_config
from .embeddings import save_embeddings, train_label_embeddings
from .engine import BadRequestError, Engine, MissingArtifactError, table_from_request
from .evaluation import (
    TestCell,
    build_test_collection,
    evaluate_files,
    format_report,
    qrels_from_cells,
    write_qrels,
    write_run,
    run_from_suggestions,
)
from .forest import ForestParams
from .kb import load_kb
from .matching import train_tmatch
from .ranking import ALL_GROUPS, train_ltr
from .stats import build_stats, save_stats
from .tables import ingest_corpus, relational_filter, write_corpus


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    for name in ("corpus", "triples", "labels", "h2h", "h2p", "embeddings",
                 "tmatch", "ltr"):
        p.add_argument(f"--{name}", help=f"path to the {name} artifact")
    p.add_argument("--gamma", type=float)
    p.add_argument("--tau-ed", type=float, dest="tau_ed")
    p.add_argument("--seed", type=int)


def _config_from_args(args) -> EngineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else load_config()
    for name in ("corpus", "triples", "labels", "h2h", "h2p", "embeddings",
                 "tmatch", "ltr", "gamma", "tau_ed", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def cmd_ingest(args) -> int:
    handle = ingest_corpus(args.corpus)
    tables = list(handle)
    if args.min_entity_rate > 0:
        tables = relational_filter(handle, args.min_entity_rate)
    write_corpus(args.out, sorted(tables, key=lambda t: t.table_id))
    print(f"ingested {len(handle)} tables ({handle.skipped_count} records skipped); "
          f"kept {len(tables)}; wrote {args.out}")
    return 0


def cmd_build_stats(args) -> int:
    corpus = ingest_corpus(args.corpus)
    kb = load_kb(args.triples, args.labels)
    stats = build_stats(corpus, kb)
    save_stats(stats, args.out_h2h, args.out_h2p)
    print(f"built stats over {len(corpus)} tables and {kb.triple_count} triples: "
          f"{len(stats.h2h)} heading pairs, {len(stats.h2p)} heading-predicate pairs")
    return 0


def cmd_train_embeddings(args) -> int:
    corpus = ingest_corpus(args.corpus)
    emb = train_label_embeddings(corpus, dim=args.dim, epochs=args.epochs,
                                 seed=args.seed, min_count=args.min_count)
    save_embeddings(emb, args.out)
    print(f"trained {len(emb.vectors)} label vectors (dim {emb.dim}); wrote {args.out}")
    return 0


def cmd_train_tmatch(args) -> int:
    corpus = ingest_corpus(args.corpus)
    pairs = []
    with open(args.pairs, "r", encoding="utf-8") as f:
        for line in f:
            if not line.strip() or line.startswith("#%"):
                continue
            a, b, grade = line.rstrip("\n").split("\t")
            ta, tb = corpus.get(a), corpus.get(b)
            if ta is None or tb is None:
                raise SystemExit(f"training pair references unknown table: {a} / {b}")
            pairs.append((ta, tb, int(grade)))
    params = ForestParams(n_trees=args.n_trees, max_depth=args.max_depth)
    model = train_tmatch(pairs, corpus, params, seed=args.seed)
    model.save(args.out)
    print(f"trained table matcher on {len(pairs)} pairs; wrote {args.out}")
    return 0


def _read_cells(path) -> list[TestCell]:
    cells = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.strip() or line.startswith("#%"):
                continue
            cells.append(TestCell.from_record(json.loads(line)))
    return cells


def cmd_train_ltr(args) -> int:
    cfg = _config_from_args(args)
    engine = Engine.load(cfg)
    if engine.ranker.stats is None:
        raise MissingArtifactError("heading statistics", "build-stats")
    if engine.ranker.tmatch_model is None:
        raise MissingArtifactError("table-matching model", "train-tmatch")
    if engine.ranker.embeddings is None:
        raise MissingArtifactError("label embeddings", "train-embeddings")
    cells = _read_cells(args.cells)
    from .evaluation import read_qrels
    qrels = read_qrels(args.qrels)
    labeled = [(c.entity, c.heading, c.input_table, qrels[c.cell_id]) for c in cells]
    groups = tuple(args.groups.split(",")) if args.groups else ALL_GROUPS
    model = train_ltr(engine.ranker, labeled, groups=groups,
                      params=cfg.forest_params(), seed=cfg.seed)
    model.save(args.out)
    top = sorted(model.importance().items(), key=lambda kv: -kv[1])[:8]
    print(f"trained value ranker on {len(cells)} cells "
          f"({len(model.schema)} features); wrote {args.out}")
    print("top feature importances: " +
          ", ".join(f"{name}={v:.3f}" for name, v in top))
    return 0


def cmd_make_testset(args) -> int:
    corpus = ingest_corpus(args.corpus)
    cells, reduced = build_test_collection(corpus, per_type=args.per_type,
                                           cells_per_column=args.cells,
                                           seed=args.seed)
    with open(args.out_cells, "w", encoding="utf-8") as f:
        f.write("#% cellac testset 1\n")
        for cell in cells:
            f.write(json.dumps(cell.to_record(), ensure_ascii=False) + "\n")
    write_qrels(args.out_qrels, qrels_from_cells(cells))
    if args.out_corpus:
        write_corpus(args.out_corpus, sorted(reduced, key=lambda t: t.table_id))
    print(f"sampled {len(cells)} test cells from {len({c.source_table_id for c in cells})} "
          f"tables; reduced corpus has {len(reduced)} tables")
    return 0


def cmd_suggest(args) -> int:
    cfg = _config_from_args(args)
    engine = Engine.load(cfg)
    if args.cells:
        if not args.run:
            raise SystemExit("batch mode needs --run for the output file")
        cells = _read_cells(args.cells)
        method = args.method or engine.default_method()
        suggestions = {}
        for cell in cells:
            suggestions[cell.cell_id] = engine._run_method(
                method, cell.entity, cell.heading, cell.input_table, args.k)
        write_run(args.run, run_from_suggestions(suggestions))
        print(f"wrote run for {len(cells)} cells to {args.run}")
        return 0
    table = None
    if args.table:
        with open(args.table, "r", encoding="utf-8") as f:
            table = table_from_request(json.load(f))
    result = engine.suggest(table=table, entity=args.entity, row=args.row,
                            heading=args.heading, column=args.column,
                            k=args.k, method=args.method)
    if args.json:
        print(json.dumps(result, ensure_ascii=False))
    else:
        print(f"suggestions for entity={result['entity']} heading={result['heading']} "
              f"(method {result['method']}):")
        for s in result["suggestions"]:
            shown = "(leave empty)" if s["isEmpty"] else (s["display"] or s["canonical"])
            print(f"  {s['rank']:2d}. {shown}  score={s['score']:.4f}")
            for ev in s["evidence"][:3]:
                if ev["kind"] == "tc":
                    print(f"      table {ev['tableId']} \"{ev['pageTitle']}\" "
                          f"column '{ev['heading']}'")
                else:
                    print(f"      kb {ev['predicate']} ({ev['label']})")
    return 0


def cmd_evaluate(args) -> int:
    report = evaluate_files(args.run, args.qrels)
    print(format_report(report, label=f"run: {args.run}"))
    if args.out:
        slim = {k: v for k, v in report.items() if k != "per_cell"}
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump({"format": "cellac-report", "version": 1, **slim}, f, indent=2)
        print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    cfg = _config_from_args(args)
    engine = Engine.load(cfg)
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellac",
        description="Evidence-backed value suggestions for relational table cells")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus file and write a snapshot")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-entity-rate", type=float, default=0.0)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("build-stats", help="build heading co-occurrence statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--triples", required=True)
    p.add_argument("--labels")
    p.add_argument("--out-h2h", required=True)
    p.add_argument("--out-h2p", required=True)
    p.set_defaults(fn=cmd_build_stats)

    p = sub.add_parser("train-embeddings", help="train heading label embeddings")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_train_embeddings)

    p = sub.add_parser("train-tmatch", help="train the table-matching model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pairs", required=True,
                   help="TSV: input_table_id, candidate_table_id, grade {0,1,2}")
    p.add_argument("--out", required=True)
    p.add_argument("--n-trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_train_tmatch)

    p = sub.add_parser("train-ltr", help="train the value-ranking model")
    _add_config_args(p)
    p.add_argument("--cells", required=True, help="test cells file (make-testset)")
    p.add_argument("--qrels", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--groups", help="comma-joined feature groups (g1,g2,g3,quality)")
    p.set_defaults(fn=cmd_train_ltr)

    p = sub.add_parser("make-testset", help="sample concealed cells for evaluation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--per-type", type=int, default=50)
    p.add_argument("--cells", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-cells", required=True)
    p.add_argument("--out-qrels", required=True)
    p.add_argument("--out-corpus")
    p.set_defaults(fn=cmd_make_testset)

    p = sub.add_parser("suggest", help="suggest values for a cell (or a cells file)")
    _add_config_args(p)
    p.add_argument("--entity")
    p.add_argument("--row", type=int)
    p.add_argument("--heading")
    p.add_argument("--column", type=int)
    p.add_argument("--table", help="JSON file with one inline table record")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--method")
    p.add_argument("--json", action="store_true", help="print the raw response object")
    p.add_argument("--cells", help="batch mode: testset cells file")
    p.add_argument("--run", help="batch mode: output run file")
    p.set_defaults(fn=cmd_suggest)

    p = sub.add_parser("evaluate", help="score a run against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--out", help="machine-readable report JSON")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("serve", help="run the HTTP suggestion service")
    _add_config_args(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BadRequestError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
