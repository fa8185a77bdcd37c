"""Command-line interface: ``ingest``, ``ask``, ``eval`` and ``config``."""

from __future__ import annotations

import argparse
import json
import logging
import random
import shutil
import sys
from contextlib import nullcontext
from importlib import resources
from pathlib import Path

from .config import MODES, EngineConfig, load_config
from .engine import Engine, Stores, Trace
from .evaluation import load_dataset, report_from_events
from .kgstore import KnowledgeGraph, Triple, load_alias_file, load_triple_file
from .providers.embedding import HashingEmbedder, HttpEmbedder
from .providers.llm import ChatCompletionLLM, ScriptedLLM
from .sources import WebFixture, load_documents

logger = logging.getLogger("evipath")

MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


def toy_dir() -> Path:
    """Directory of the bundled toy fixtures."""
    return Path(str(resources.files("evipath").joinpath("data", "toy")))


# -- store -------------------------------------------------------------------

def ingest(out: Path, kg: list[tuple[str, Path]], docs: Path | None = None, web: Path | None = None,
           aliases: Path | None = None) -> dict:
    """Validate inputs, copy them into ``out`` and write a manifest."""
    out.mkdir(parents=True, exist_ok=True)
    (out / "kg").mkdir(exist_ok=True)
    manifest: dict = {"kg": [], "docs": None, "web": None, "aliases": None}
    graphs = {}
    for name, path in kg:
        g, dupes = load_triple_file(path, name)
        graphs[name] = g
        target = out / "kg" / f"{name}.tsv"
        shutil.copyfile(path, target)
        manifest["kg"].append({"name": name, "file": f"kg/{name}.tsv", "triples": len(g),
                               "entities": len(g.entities), "duplicates": dupes})
    if aliases is not None:
        added = sum(load_alias_file(aliases, g) for g in graphs.values())
        shutil.copyfile(aliases, out / "aliases.tsv")
        manifest["aliases"] = {"file": "aliases.tsv", "added": added}
    if docs is not None:
        n = len(load_documents(docs))
        shutil.copyfile(docs, out / "docs.jsonl")
        manifest["docs"] = {"file": "docs.jsonl", "documents": n}
    if web is not None:
        fx = WebFixture.from_file(web)
        shutil.copyfile(web, out / "web.jsonl")
        manifest["web"] = {"file": "web.jsonl", "queries": len(fx.results)}
    manifest["sources"] = [k["name"] for k in manifest["kg"]] + [x for x in ("docs", "web") if manifest[x]]
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def sample_triples(g: KnowledgeGraph, fraction: float, seed: int) -> KnowledgeGraph:
    """Keep a uniformly drawn ``fraction`` of ``g``'s triples (labels and aliases kept for survivors)."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    triples = g.triples()
    keep = set(random.Random(seed).sample(range(len(triples)), round(fraction * len(triples))))
    out = KnowledgeGraph()
    for i, t in enumerate(triples):
        if i in keep:
            out.add_triple(Triple(t.head, t.relation, t.tail, t.source), g.label(t.head), g.label(t.tail))
    for eid, ent in out.entities.items():
        ent.aliases |= g.entities[eid].aliases
    return out


def load_store(store: Path, kg_completeness: float = 1.0, seed: int = 0) -> Stores:
    path = store / MANIFEST
    if not path.is_file():
        raise UsageError(f"no store at {store} (missing {MANIFEST}); run 'evipath ingest' first")
    manifest = json.loads(path.read_text(encoding="utf-8"))
    graphs = {}
    for entry in manifest["kg"]:
        g, _ = load_triple_file(store / entry["file"], entry["name"])
        if manifest.get("aliases"):
            load_alias_file(store / manifest["aliases"]["file"], g)
        if kg_completeness < 1.0:
            g = sample_triples(g, kg_completeness, seed)
        graphs[entry["name"]] = g
    docs = load_documents(store / manifest["docs"]["file"]) if manifest.get("docs") else []
    search = WebFixture.from_file(store / manifest["web"]["file"]) if manifest.get("web") else WebFixture()
    return Stores(graphs, docs, search)


# -- providers ---------------------------------------------------------------

def build_engine(args: argparse.Namespace, cfg: EngineConfig) -> Engine:
    stores = load_store(Path(args.store), args.kg_completeness, cfg.seed)
    if args.transcript:
        llm = ScriptedLLM.from_file(args.transcript)
    elif cfg.llm_base_url and cfg.llm_model:
        llm = ChatCompletionLLM(cfg.llm_base_url, cfg.llm_model, cfg.llm_api_key_env)
    else:
        raise UsageError("no LLM configured: pass --transcript or set llm_base_url and llm_model")
    if cfg.embedder == "http":
        embedder = HttpEmbedder(cfg.embed_base_url, cfg.embed_model)
    else:
        embedder = HashingEmbedder(cfg.embed_dim)
    return Engine(stores, llm, embedder, cfg)


def _config(args: argparse.Namespace) -> EngineConfig:
    return load_config(args.config, {"mode": args.mode, "seed": args.seed})


def _open_trace(args: argparse.Namespace):
    return open(args.trace, "w", encoding="utf-8") if args.trace else nullcontext(None)


# -- commands ----------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace) -> int:
    if args.toy:
        base = toy_dir()
        kg = [("freebase", base / "freebase.tsv"), ("wikikg", base / "wikikg.tsv")]
        docs, web, aliases = base / "docs.jsonl", base / "web.jsonl", base / "aliases.tsv"
    else:
        kg = []
        for spec in args.kg or []:
            if "=" not in spec:
                raise UsageError(f"--kg expects NAME=PATH, got {spec!r}")
            name, path = spec.split("=", 1)
            kg.append((name, Path(path)))
        docs = Path(args.docs) if args.docs else None
        web = Path(args.web) if args.web else None
        aliases = Path(args.aliases) if args.aliases else None
    manifest = ingest(Path(args.store), kg, docs, web, aliases)
    for entry in manifest["kg"]:
        print(f"{entry['name']}: {entry['triples']} triples, {entry['entities']} entities, "
              f"{entry['duplicates']} duplicate lines dropped")
    if manifest["docs"]:
        print(f"docs: {manifest['docs']['documents']} documents")
    if manifest["web"]:
        print(f"web: {manifest['web']['queries']} queries")
    print(f"sources: {', '.join(manifest['sources'])}")
    return 0


def cmd_ask(args: argparse.Namespace) -> int:
    cfg = _config(args)
    engine = build_engine(args, cfg)
    with _open_trace(args) as sink:
        rec = engine.answer_question(args.question, Trace(sink))
    print(f"answer: {rec.answer}")
    print(f"verified_by: {', '.join(sorted(rec.verified_by)) or '-'}")
    print(f"phase: {rec.phase}{' (fallback)' if rec.fallback else ''}")
    for p in rec.supporting_paths:
        print(f"  [{p.source}] {p.text}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _config(args)
    items = load_dataset(args.dataset)
    engine = build_engine(args, cfg) if items else None
    with _open_trace(args) as sink:
        trace = Trace(sink)
        for item in items:
            trace.emit("item", id=item.id, question=item.question, answers=item.answers)
            try:
                engine.answer_question(item.question, trace)
            except Exception as exc:  # noqa: BLE001 - one bad item must not stop the run
                logger.error("item %s failed: %s", item.id, exc)
                trace.emit("item_error", id=item.id, error=f"{type(exc).__name__}: {exc}")
    report = report_from_events(trace.events)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    if args.json:
        print(text)
    else:
        print(f"items: {report.items}  Hits@1: {report.hits_at_1:.3f}  grounded Hits@1: "
              f"{report.grounded_hits_at_1:.3f}  errors: {report.errors}")
        print("answer sources: " + ", ".join(f"{k}={v}" for k, v in sorted(report.composition.items())))
        print(f"llm calls: {report.llm_calls} (max {report.max_llm_calls}/item)  token proxy: "
              f"{report.token_proxy}")
    return 0


def cmd_config(args: argparse.Namespace) -> int:
    if args.action == "init":
        target = Path(args.path)
        if target.exists() and not args.force:
            raise UsageError(f"{target} exists; use --force to overwrite")
        target.write_text(EngineConfig().dumps(), encoding="utf-8")
        print(f"wrote {target}")
    else:
        sys.stdout.write(_config(args).dumps())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--store", default="store", help="store directory written by ingest")
    common.add_argument("--transcript", help="scripted LLM transcript (JSON lines)")
    common.add_argument("--trace", help="write the JSON-lines event trace here")
    common.add_argument("--mode", choices=MODES, help="full or hydra-e (one relation per edge)")
    common.add_argument("--seed", type=int, help="seed for relation and triple sampling")
    common.add_argument("--kg-completeness", type=float, default=1.0,
                        help="fraction of KG triples kept at load time (default 1.0)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="evipath", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="validate sources and build a store")
    p.add_argument("--kg", action="append", metavar="NAME=PATH", help="triple file bound to a KG source")
    p.add_argument("--docs", help="documents JSON lines")
    p.add_argument("--web", help="web fixture JSON lines")
    p.add_argument("--aliases", help="entity_id<TAB>alias... file")
    p.add_argument("--toy", action="store_true", help="ingest the bundled toy fixtures")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("ask", parents=[common], help="answer one question")
    p.add_argument("question")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("eval", parents=[common], help="Hits@1 over a dataset")
    p.add_argument("dataset", help="JSON lines {question, answers}")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the full JSON report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("config", parents=[common], help="show or initialise configuration")
    p.add_argument("action", choices=("show", "init"))
    p.add_argument("path", nargs="?", default="evipath.conf")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"evipath: error: {exc}\n")
    except (ValueError, OSError) as exc:
        parser.exit(1, f"evipath: error: {exc}\n")


if __name__ == "__main__":
    raise SystemExit(main())
