"""Command-line interface.

Verbs: ingest, refine, eval, label, serve, chat, plus `bridge render` which
reads a case JSON on stdin and writes the composed prompt to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bridge import compose_query
from .chat import ChatService
from .config import load_config
from .errors import RadbridgeError
from .evaluation import format_table
from .labeler import UncertainPolicy, label_report, load_cues, load_lexicon
from .pipeline import Pipeline, evaluate_offline
from .store import CaseStore
from .types import CaseRecord, PromptDesign


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radbridge",
        description=(
            "Bridge CAD model outputs into prompts, refine radiology reports "
            "with an LLM backend, evaluate them, and chat about a case."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load cases from a JSONL/CSV file")
    p_ingest.add_argument("--config", required=True)
    p_ingest.add_argument("--in", dest="infile", required=True)
    p_ingest.add_argument("--format", choices=["jsonl", "csv"], default=None)

    p_refine = sub.add_parser("refine", help="refine one case through a backend")
    p_refine.add_argument("--config", required=True)
    p_refine.add_argument("--case", required=True)
    p_refine.add_argument("--design", choices=["p1", "p2", "p3"], required=True)
    p_refine.add_argument("--backend", required=True)
    p_refine.add_argument("--suppress", action="store_true",
                          help="ask the model not to mention the networks")

    p_eval = sub.add_parser(
        "eval",
        help="evaluate refined reports (from a file, or by running a backend)",
    )
    p_eval.add_argument("--config")
    p_eval.add_argument("--in", dest="infile",
                        help="JSONL of {caseId, refinedReport, draftReport, groundTruthLabels}")
    p_eval.add_argument("--design", choices=["p1", "p2", "p3"])
    p_eval.add_argument("--backend")
    p_eval.add_argument("--per-category", type=int, default=2)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--suppress", action="store_true")
    p_eval.add_argument("--uncertain-policy", choices=["asPositive", "asNegative"],
                        default="asPositive")
    p_eval.add_argument("--json", dest="json_out", help="also write the EvalReport here")

    p_label = sub.add_parser("label", help="label free-text reports from a JSONL file")
    p_label.add_argument("--in", dest="infile", required=True)
    p_label.add_argument("--out", dest="outfile", required=True)
    p_label.add_argument("--lexicon")
    p_label.add_argument("--cues")

    p_serve = sub.add_parser("serve", help="run the HTTP API (and UI when built)")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8787)

    p_chat = sub.add_parser("chat", help="interactive grounded chat on one case")
    p_chat.add_argument("--config", required=True)
    p_chat.add_argument("--case", required=True)
    p_chat.add_argument("--report", required=True)
    p_chat.add_argument("--backend", required=True)

    p_bridge = sub.add_parser("bridge", help="prompt-construction utilities")
    bridge_sub = p_bridge.add_subparsers(dest="bridge_command", required=True)
    p_render = bridge_sub.add_parser(
        "render", help="case JSON on stdin -> composed prompt on stdout"
    )
    p_render.add_argument("--design", choices=["p1", "p2", "p3"], required=True)
    p_render.add_argument("--suppress", action="store_true")

    return parser


def _make_pipeline(config_path: str) -> tuple[Pipeline, CaseStore, object]:
    config = load_config(config_path)
    store = CaseStore(config.store_path)
    lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else None
    cues = load_cues(config.cues_path) if config.cues_path else None
    pipeline = Pipeline(
        store,
        config.backends,
        throttles=config.build_throttles(),
        lexicon=lexicon,
        cues=cues,
    )
    return pipeline, store, config


def _cmd_ingest(args) -> int:
    pipeline, _, _ = _make_pipeline(args.config)
    result = pipeline.ingest_file(args.infile, args.format)
    print(json.dumps(result.to_json_dict(), indent=2))
    return 0 if not result.errors else 1


def _cmd_refine(args) -> int:
    pipeline, _, _ = _make_pipeline(args.config)
    report, cached = pipeline.refine_case(
        args.case,
        PromptDesign.from_string(args.design),
        args.backend,
        args.suppress,
    )
    body = report.to_json_dict()
    body["cached"] = cached
    print(json.dumps(body, indent=2))
    return 0


def _cmd_eval(args) -> int:
    policy = UncertainPolicy.from_string(args.uncertain_policy)
    if args.infile:
        rows = []
        with open(args.infile, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    rows.append(json.loads(line))
        lexicon = load_lexicon(args.lexicon) if getattr(args, "lexicon", None) else None
        report = evaluate_offline(rows, uncertain_policy=policy, lexicon=lexicon)
    else:
        if not (args.config and args.design and args.backend):
            print("eval needs either --in FILE or --config/--design/--backend",
                  file=sys.stderr)
            return 2
        pipeline, _, _ = _make_pipeline(args.config)
        _, report = pipeline.run_evaluation(
            PromptDesign.from_string(args.design),
            args.backend,
            args.per_category,
            args.seed,
            suppress_mention=args.suppress,
            uncertain_policy=policy,
        )
    print(format_table(report))
    if args.json_out:
        Path(args.json_out).write_text(
            json.dumps(report.to_json_dict(), indent=2, sort_keys=True),
            encoding="utf-8",
        )
    return 0


def _cmd_label(args) -> int:
    lexicon = load_lexicon(args.lexicon) if args.lexicon else None
    cues = load_cues(args.cues) if args.cues else None
    written = 0
    with open(args.infile, encoding="utf-8") as src, open(
        args.outfile, "w", encoding="utf-8"
    ) as dst:
        for line in src:
            if not line.strip():
                continue
            row = json.loads(line)
            text = row.get("text", row.get("draftReport", ""))
            labels = label_report(text, lexicon, cues)
            out = {"labels": labels.to_json_dict()}
            if "caseId" in row:
                out["caseId"] = row["caseId"]
            if "id" in row:
                out["id"] = row["id"]
            dst.write(json.dumps(out, ensure_ascii=False, sort_keys=True) + "\n")
            written += 1
    print(f"labeled {written} report(s) -> {args.outfile}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import build_app_from_config

    config = load_config(args.config)
    app = build_app_from_config(config)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _cmd_chat(args) -> int:
    pipeline, store, _ = _make_pipeline(args.config)
    service = ChatService(store, pipeline.backends)
    session = service.open_session(args.case, args.report)
    print(f"session {session.session_id} opened; empty line to quit")
    for line in sys.stdin:
        question = line.strip()
        if not question:
            break
        answer = service.ask(session.session_id, question, args.backend)
        print(answer.content)
    return 0


def _cmd_bridge_render(args) -> int:
    payload = json.load(sys.stdin)
    case = CaseRecord.from_json_dict(payload)
    bundle = compose_query(
        case, PromptDesign.from_string(args.design), args.suppress
    )
    sys.stdout.write(bundle.full_text + "\n")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "refine":
            return _cmd_refine(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "label":
            return _cmd_label(args)
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "chat":
            return _cmd_chat(args)
        if args.command == "bridge":
            return _cmd_bridge_render(args)
    except RadbridgeError as exc:
        print(f"error ({exc.kind}): {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
