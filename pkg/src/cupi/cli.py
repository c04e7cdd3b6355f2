"""Batch front end over the job handlers.

JSON documents in, TSV tables or JSON reports out.  Exit codes: 0 done,
2 the input failed validation, 3 the computation could not finish, 4 a
bug.  Rows are assembled in sorted order and files are written
atomically, so identical inputs give byte-identical reports at any job
count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .service import handlers
from .service.handlers import ParseError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3
EXIT_INTERNAL = 4

_AXIOM_ORDER = ("normalization", "bounded_below", "stalk_vanishing", "attaching")


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not JSON: {e}")


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


# -- table rendering ----------------------------------------------------------


def _pstr(perversity) -> str:
    if isinstance(perversity, str):
        return perversity
    return ",".join(str(v) for v in perversity)


def _mstr(rows: Sequence[str]) -> str:
    return ",".join(rows) if rows else "-"


def _render_tsv(sections) -> str:
    blocks = []
    for name, header, rows in sections:
        lines = [f"# {name}"] if len(sections) > 1 else []
        lines.append("\t".join(header))
        lines.extend("\t".join(str(c) for c in row) for row in rows)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _render_json(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _page_sections(report: dict) -> list:
    return [
        ("pages", ("page", "p", "q", "dim"),
         [(r["page"], r["p"], r["q"], r["dim"]) for r in report["pages"]]),
        ("infinity", ("p", "q", "dim"),
         [(r["p"], r["q"], r["dim"]) for r in report["infinity"]]),
        ("abutment", ("degree", "dim"),
         [(r["degree"], r["dim"]) for r in report["abutment"]]),
    ]


def _sections(command: str, report: dict) -> list:
    if command == "cohomology":
        return [("cohomology", ("degree", "dim"),
                 [(r["degree"], r["dim"]) for r in report["rows"]])]
    if command == "steenrod":
        return [("operations",
                 ("s", "degree", "target", "source_dim", "target_dim", "rank", "matrix"),
                 [(e["s"], e["degree"], e["target"], e["source_dim"],
                   e["target_dim"], e["rank"], _mstr(e["matrix"]))
                  for e in report["entries"]])]
    if command == "spectral":
        return _page_sections(report)
    if command == "weight":
        out = _page_sections(report)
        out.append(("weight_graded", ("degree", "p", "dim"),
                    [(r["degree"], r["p"], r["dim"]) for r in report["weight_graded"]]))
        if report["operations"]:
            out.append(("operations",
                        ("s", "page", "p", "q", "target_p", "target_q", "rank", "matrix"),
                        [(e["s"], e["page"], e["p"], e["q"], e["target_p"],
                          e["target_q"], e["rank"], _mstr(e["matrix"]))
                         for e in report["operations"]]))
        if report.get("dual_row"):
            dual = report["dual_row"]
            out.append(("dual_row", ("p", "dim", "reduced", "unreduced"),
                        [(r["p"], r["dim"], r["reduced"], r["unreduced"])
                         for r in dual["row"]]))
        return out
    if command == "ih":
        return [("ih", ("perversity", "degree", "dim"),
                 [(_pstr(r["perversity"]), r["degree"], r["dim"]) for r in report["rows"]])]
    if command == "deligne":
        rows = [
            (_pstr(level["perversity"]), r["degree"], r["dim"])
            for level in report["levels"] for r in level["rows"]
        ]
        return [("deligne", ("perversity", "degree", "dim"), rows)]
    if command == "check-axioms":
        rows = []
        for level in report["levels"]:
            p = _pstr(level["perversity"])
            if level.get("skipped"):
                rows.append((p, "all", "skipped"))
                continue
            for axiom in _AXIOM_ORDER:
                ok = level["axioms"][axiom]["ok"]
                rows.append((p, axiom, "pass" if ok else "fail"))
        return [("axioms", ("perversity", "axiom", "status"), rows)]
    if command == "perversity":
        if report["op"] == "list":
            return [("perversities", ("values",),
                     [(_pstr(p),) for p in report["perversities"]])]
        if report["op"] == "sum":
            return [("sum", ("a", "b", "result"),
                     [(_pstr(report["a"]), _pstr(report["b"]), _pstr(report["result"]))])]
        return [("landing", ("p", "s", "result"),
                 [(_pstr(report["a"]), report["s"], _pstr(report["result"]))])]
    if command == "validate":
        return [("violations", ("path", "message"),
                 [(v["path"], v["message"]) for v in report["violations"]])]
    raise ValueError(f"no table layout for {command!r}")


# -- argument parsing ---------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="cupi",
        description="Exact cohomology, Steenrod squares, spectral sequences, "
                    "weight pages and intersection cohomology on finite complexes.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def job(name: str, help_: str, stratified: bool = False) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_)
        cmd.add_argument("--input", required=True, help="path to the JSON document")
        cmd.add_argument("--ring", default="F2", help="coefficients, F2 or Q")
        cmd.add_argument("--format", choices=("tsv", "json"), default="tsv")
        cmd.add_argument("--output", default=None, help="write here instead of stdout")
        if stratified:
            cmd.add_argument("--perversity", action="append", default=None,
                             help="zero, top, inf, all, or comma-joined values; repeatable")
        return cmd

    job("cohomology", "graded dimensions of H*(K)")

    cmd = job("steenrod", "Sq^s tables on H*(K; F2)")
    cmd.add_argument("--s", default=None, help="a single s or a range a..b")
    cmd.add_argument("--degree", type=int, default=None, help="restrict the source degree")

    cmd = job("spectral", "pages of a filtered cochain complex")
    cmd.add_argument("--filtration", choices=("canonical", "bete", "trivial"),
                     default="canonical")
    cmd.add_argument("--pages", default=None, help="a single page or a range a..b")
    cmd.add_argument("--jobs", type=int, default=1)

    cmd = job("weight", "weight pages of a hyperresolution descriptor")
    cmd.add_argument("--pages", default=None, help="a single page or a range a..b")
    cmd.add_argument("--steenrod", nargs="?", const="0..2", default=None,
                     help="emit P^s tables on the second page (default s range 0..2)")
    cmd.add_argument("--jobs", type=int, default=1)

    job("ih", "intersection homology by perversity", stratified=True)
    job("deligne", "hypercohomology of the truncation tower", stratified=True)
    job("check-axioms", "sheaf conditions on the truncation tower")

    cmd = sub.add_parser("perversity", help="perversity arithmetic")
    cmd.add_argument("--n", type=int, required=True, help="ambient dimension")
    cmd.add_argument("--op", choices=("list", "sum", "landing"), default="list")
    cmd.add_argument("--a", default=None, help="first perversity")
    cmd.add_argument("--b", default=None, help="second perversity (sum)")
    cmd.add_argument("--s", type=int, default=None, help="operation degree (landing)")
    cmd.add_argument("--format", choices=("tsv", "json"), default="tsv")
    cmd.add_argument("--output", default=None)

    cmd = sub.add_parser("validate", help="schema-check a document without computing")
    cmd.add_argument("--input", required=True)
    cmd.add_argument("--schema", choices=("auto",) + handlers.SCHEMAS, default="auto")
    cmd.add_argument("--format", choices=("tsv", "json"), default="tsv")
    cmd.add_argument("--output", default=None)

    cmd = sub.add_parser("serve", help="run the HTTP service")
    cmd.add_argument("--host", default="127.0.0.1")
    cmd.add_argument("--port", type=int, default=8000)
    return top


def _dispatch(args: argparse.Namespace) -> dict:
    cmd = args.command
    if cmd == "cohomology":
        return handlers.run_cohomology(_load(args.input), args.ring)
    if cmd == "steenrod":
        return handlers.run_steenrod(_load(args.input), args.ring, args.s, args.degree)
    if cmd == "spectral":
        return handlers.run_spectral(_load(args.input), args.ring, args.filtration,
                                     args.pages, args.jobs)
    if cmd == "weight":
        return handlers.run_weight(_load(args.input), args.ring, args.pages,
                                   args.steenrod, args.jobs)
    if cmd == "ih":
        return handlers.run_ih(_load(args.input), args.ring, args.perversity)
    if cmd == "deligne":
        return handlers.run_deligne(_load(args.input), args.ring, args.perversity)
    if cmd == "check-axioms":
        return handlers.run_axioms(_load(args.input), args.ring)
    if cmd == "perversity":
        return handlers.run_perversity(args.n, args.op, args.a, args.b, args.s)
    if cmd == "validate":
        return handlers.validate_document(_load(args.input), args.schema)
    raise ValueError(f"unknown command {cmd!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return EXIT_OK
    try:
        report = _dispatch(args)
    except Exception as e:  # noqa: BLE001 - sorted into exit codes below
        kind = handlers.classify_error(e)
        body = {"kind": kind, "message": str(e)}
        where = getattr(e, "path", None)
        if where:
            body["where"] = where
        sys.stderr.write(json.dumps({"error": body}, sort_keys=True) + "\n")
        if kind == "validation":
            return EXIT_VALIDATION
        if kind == "computation":
            return EXIT_COMPUTATION
        return EXIT_INTERNAL
    if args.format == "json":
        text = _render_json(report)
    else:
        text = _render_tsv(_sections(args.command, report))
    _emit(text, args.output)
    if args.command == "validate" and not report["ok"]:
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
