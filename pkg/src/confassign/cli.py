"""Command-line gateway over the workflow store.

Every subcommand loads the conference document, performs exactly one store
or detector operation, persists when it mutated state, and reports on
stdout (text or JSON). Exit codes: 0 success, 1 domain error (error name on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Sequence

from .coi import ingest_bibliography
from .errors import EngineError, IllegalState
from .taxonomy import load_taxonomy_xml
from .workflow import (
    WorkflowStore,
    conference_from_parts,
    config_to_dict,
    proposal_view,
)

CSV_COLUMNS = ["paper_id", "reviewer_id", "factor", "provenance", "pass", "origin", "approval"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confassign",
        description="Paper-reviewer assignment engine and workflow gateway.",
    )
    parser.add_argument("--conference", required=True, help="conference document path")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import-conference", help="create the document from setup JSON")
    p.add_argument("setup", help="setup JSON with papers/reviewers/roster/bids/config")
    p.add_argument("--taxonomy", required=True, help="taxonomy XML file")

    p = sub.add_parser("import-taxonomy", help="replace the taxonomy (resets to Draft)")
    p.add_argument("taxonomy", help="taxonomy XML file")

    p = sub.add_parser("ingest-bib", help="validate a bibliography dump and report counts")
    p.add_argument("bib", help="DBLP-style XML dump")

    p = sub.add_parser("detect-coi", help="report conflicts without changing state")
    p.add_argument("--bib", help="bibliography dump for historical co-authorship")
    p.add_argument("--current-year", type=int, default=None)

    p = sub.add_parser("build-matrix", help="run the full pipeline and store the matrix")
    p.add_argument("--bib", help="bibliography dump for historical co-authorship")
    p.add_argument("--current-year", type=int, default=None)
    p.add_argument("--actor", default="chair")

    p = sub.add_parser("propose", help="run the configured solver")
    p.add_argument("--actor", default="chair")

    p = sub.add_parser("approve", help="approve the proposal, fully or edge by edge")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--all", action="store_true")
    group.add_argument("--edges", help="comma-separated edge ids (paper|reviewer)")
    p.add_argument("--actor", default="chair")

    p = sub.add_parser("assign", help="manually add an edge")
    p.add_argument("paper_id")
    p.add_argument("reviewer_id")
    p.add_argument("--force", action="store_true")
    p.add_argument("--actor", default="chair")

    p = sub.add_parser("unassign", help="manually remove an edge")
    p.add_argument("paper_id")
    p.add_argument("reviewer_id")
    p.add_argument("--actor", default="chair")

    p = sub.add_parser("what-if", help="re-solve with pins/exclusions, no state change")
    p.add_argument(
        "--pin", nargs=2, action="append", default=[], metavar=("PAPER", "REVIEWER")
    )
    p.add_argument(
        "--forbid", nargs=2, action="append", default=[], metavar=("PAPER", "REVIEWER")
    )

    p = sub.add_parser("export", help="write the assignment CSV")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("status", help="print workflow status")

    p = sub.add_parser("serve", help="start the HTTP gateway")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--bib", help="bibliography dump attached to the running store")
    p.add_argument("--static", help="directory with the chair console build")

    return parser


def _emit(payload: dict | list, fmt: str, text_lines: list[str]) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _load_store(path: str) -> WorkflowStore:
    return WorkflowStore.load(path)


def _proposal_lines(payload: dict) -> list[str]:
    lines = [f"stage: {payload['stage']}"]
    for e in payload.get("edges", []):
        lines.append(
            f"  {e['paper_id']} <- {e['reviewer_id']}"
            f" factor={e['factor']:.4f} pass={e['pass']}"
            f" {e.get('origin', '')} {e.get('approval', '')}".rstrip()
        )
    if "total_weight" in payload:
        lines.append(f"total weight: {payload['total_weight']:.4f}")
    return lines


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    fmt = args.format
    conference_path = Path(args.conference)

    try:
        return _dispatch(args, fmt, conference_path)
    except EngineError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 1


def _dispatch(args: argparse.Namespace, fmt: str, conference_path: Path) -> int:
    cmd = args.command

    if cmd == "import-conference":
        setup = json.loads(Path(args.setup).read_text(encoding="utf-8"))
        taxonomy = load_taxonomy_xml(Path(args.taxonomy).read_bytes())
        conference = conference_from_parts(
            taxonomy,
            setup.get("papers", []),
            setup.get("reviewers", []),
            setup.get("roster", []),
            setup.get("bids", []),
            setup.get("explicit_cois", []),
            setup.get("config", {}),
        )
        store = WorkflowStore(conference)
        store.save(conference_path)
        payload = store.status()
        _emit(payload, fmt, [f"imported conference: {payload['papers']} papers, "
                             f"{payload['reviewers']} reviewers, stage {payload['stage']}"])
        return 0

    if cmd == "ingest-bib":
        corpus = ingest_bibliography(Path(args.bib).read_bytes())
        payload = {
            "records": len(corpus),
            "skipped": corpus.skipped,
            "warnings": corpus.warnings,
        }
        _emit(payload, fmt, [f"records: {len(corpus)}", f"skipped: {corpus.skipped}"]
              + [f"warning: {w}" for w in corpus.warnings])
        return 0

    store = _load_store(str(conference_path))

    if cmd == "import-taxonomy":
        taxonomy = load_taxonomy_xml(Path(args.taxonomy).read_bytes())
        conference = conference_from_parts(
            taxonomy,
            [
                {"id": p.id, "title": p.title, "author_ids": list(p.author_ids),
                 "keywords": sorted(p.keywords)}
                for p in store.conference.papers
            ],
            [
                {"person_id": rv.person_id,
                 "selection": {kw: lvl.name for kw, lvl in rv.selection.items()}}
                for rv in store.conference.reviewers
            ],
            [
                {"id": p.id, "name": p.name, "email": p.email,
                 "country": p.country, "affiliation": p.affiliation}
                for p in store.conference.roster
            ],
            [
                {"paper_id": p, "reviewer_id": r, "level": bid.value}
                for (p, r), bid in store.conference.bids.items()
            ],
            [{"paper_id": p, "reviewer_id": r} for p, r in store.conference.explicit_cois],
            config_to_dict(store.conference.config),
        )
        fresh = WorkflowStore(conference)
        fresh.save(conference_path)
        _emit(fresh.status(), fmt, [f"taxonomy replaced, stage {fresh.stage.value}"])
        return 0

    if cmd == "detect-coi":
        if args.bib:
            store.attach_bibliography(ingest_bibliography(Path(args.bib).read_bytes()))
        records = store.detect_conflicts(args.current_year)
        payload = [
            {"paper_id": r.paper_id, "reviewer_id": r.reviewer_id,
             "reason": r.reason.value, "evidence": r.evidence}
            for r in records
        ]
        _emit(payload, fmt, [f"{len(records)} conflict(s)"] + [
            f"  {r.paper_id} x {r.reviewer_id}: {r.reason.value} ({r.evidence})"
            for r in records
        ])
        return 0

    if cmd == "build-matrix":
        if args.bib:
            store.attach_bibliography(ingest_bibliography(Path(args.bib).read_bytes()))
        matrix = store.run_pipeline(actor=args.actor, current_year=args.current_year)
        store.save(conference_path)
        conflict_cells = sum(
            1 for row in matrix.cells for cell in row if cell.provenance.value == "Conflict"
        )
        payload = {
            "stage": store.stage.value,
            "papers": len(matrix.papers),
            "reviewers": len(matrix.reviewers),
            "conflict_cells": conflict_cells,
        }
        _emit(payload, fmt, [
            f"matrix built: {len(matrix.papers)}x{len(matrix.reviewers)}, "
            f"{conflict_cells} conflict cell(s), stage {store.stage.value}"
        ])
        return 0

    if cmd == "propose":
        store.propose(actor=args.actor)
        store.save(conference_path)
        payload = proposal_view(store)
        _emit(payload, fmt, _proposal_lines(payload))
        return 0

    if cmd == "approve":
        ids = None if args.all else [e for e in args.edges.split(",") if e]
        stage = store.approve(ids, actor=args.actor)
        store.save(conference_path)
        _emit({"stage": stage.value}, fmt, [f"stage: {stage.value}"])
        return 0

    if cmd == "assign":
        edge = store.manual_assign(
            args.paper_id, args.reviewer_id, force=args.force, actor=args.actor
        )
        store.save(conference_path)
        payload = {
            "stage": store.stage.value,
            "edge_id": edge.edge_id,
            "factor": edge.factor,
        }
        _emit(payload, fmt, [f"assigned {edge.edge_id} (factor {edge.factor:.4f})"])
        return 0

    if cmd == "unassign":
        store.manual_unassign(args.paper_id, args.reviewer_id, actor=args.actor)
        store.save(conference_path)
        _emit({"stage": store.stage.value}, fmt, [f"unassigned, stage {store.stage.value}"])
        return 0

    if cmd == "what-if":
        proposal = store.what_if(
            pinned=[tuple(p) for p in args.pin],
            forbidden=[tuple(p) for p in args.forbid],
        )
        payload = {
            "stage": store.stage.value,
            "edges": [
                {"paper_id": e.paper_id, "reviewer_id": e.reviewer_id,
                 "factor": e.factor, "pass": e.pass_num, "origin": e.origin.value}
                for e in proposal.edges
            ],
            "total_weight": proposal.total_weight(),
        }
        _emit(payload, fmt, _proposal_lines(payload))
        return 0

    if cmd == "export":
        if store.proposal is None:
            raise IllegalState("nothing to export: no proposal exists")
        assert store.matrix is not None
        rows = []
        for e in store.proposal.edges:
            cell = store.matrix.cell(e.paper_id, e.reviewer_id)
            rows.append([
                e.paper_id, e.reviewer_id, repr(e.factor), cell.provenance.value,
                str(e.pass_num), e.origin.value, e.approval.value,
            ])
        out = Path(args.out)
        with out.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            writer.writerows(rows)
        _emit({"rows": len(rows), "path": str(out)}, fmt,
              [f"wrote {len(rows)} assignment row(s) to {out}"])
        return 0

    if cmd == "status":
        payload = store.status()
        _emit(payload, fmt, [f"{k}: {v}" for k, v in payload.items()])
        return 0

    if cmd == "serve":
        import uvicorn

        from .service import create_app

        if args.bib:
            store.attach_bibliography(ingest_bibliography(Path(args.bib).read_bytes()))
        app = create_app(store, persist_path=conference_path, static_dir=args.static)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
        return 0

    raise AssertionError(f"unhandled command: {cmd}")  # pragma: no cover


def entrypoint() -> None:  # console_scripts hook
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
