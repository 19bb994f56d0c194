"""Command line entry points: structure chains offline, replay scripted
sessions, and launch the service.

Exit codes: 0 success, 1 usage/config error, 2 runtime failure with
partial output written, 3 fixture drift. Diagnostics go to stderr; stdout
stays machine-parseable (JSON lines with --verbose).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Optional

from .chain.edits import EditError
from .config import AppConfig, ConfigError, load_config
from .engine.engine import SessionEngine
from .engine.errors import EngineError
from .engine.session import Session
from .providers.errors import FixtureMismatch
from .service.wiring import build_engine

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_FIXTURE_DRIFT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reasonweave",
        description="Structure, steer, and re-answer model reasoning chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    structure = sub.add_parser(
        "structure", help="structure a recorded reasoning chain into a tree")
    structure.add_argument("--input", required=True, help="file holding the raw chain")
    structure.add_argument("--query", required=True, help="the user query the chain answers")
    structure.add_argument("--out", required=True, help="where to write the tree JSON")
    structure.add_argument("--fixtures", help="scripted provider fixtures (JSON)")
    structure.add_argument("--config", help="TOML config file")
    structure.add_argument("--verbose", action="store_true",
                           help="print session events as JSON lines")

    serve = sub.add_parser("serve", help="launch the HTTP service")
    serve.add_argument("--config", help="TOML config file")
    serve.add_argument("--port", type=int, help="override the configured port")
    serve.add_argument("--host", help="override the configured host")
    serve.add_argument("--fixtures", help="run against scripted providers")

    replay = sub.add_parser(
        "replay", help="replay a scripted edit trace and print the event-log digest")
    replay.add_argument("--session", required=True, help="session JSON (needs user_prompt)")
    replay.add_argument("--script", required=True, help="JSON list of steps")
    replay.add_argument("--fixtures", required=True, help="scripted provider fixtures")
    replay.add_argument("--config", help="TOML config file")
    replay.add_argument("--verbose", action="store_true",
                        help="print session events as JSON lines")

    return parser


def _load_config(path: Optional[str]) -> AppConfig:
    return load_config(path)


def event_log_digest(session: Session) -> str:
    doc = json.dumps([e.to_dict() for e in session.events],
                     sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()


def _print_events(session: Session, start: int) -> int:
    for event in session.events[start:]:
        print(json.dumps(event.to_dict(), ensure_ascii=False))
    return len(session.events)


def cmd_structure(args: argparse.Namespace) -> int:
    input_path = Path(args.input)
    if not input_path.exists():
        print(f"input file not found: {input_path}", file=sys.stderr)
        return EXIT_USAGE
    if not args.query.strip():
        print("query must be non-empty", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    chain = input_path.read_text(encoding="utf-8").strip()
    if not chain:
        print("input chain is empty", file=sys.stderr)
        return EXIT_USAGE

    engine = build_engine(config, fixtures_path=args.fixtures,
                          interactive=False, run_mode="sync", with_store=False)
    session = engine.create_session(args.query)
    try:
        engine.start(session, raw_think=chain)
    except FixtureMismatch as exc:
        print(f"fixture drift for template '{exc.template_id}': {exc}", file=sys.stderr)
        return EXIT_FIXTURE_DRIFT

    if args.verbose:
        _print_events(session, 0)

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(session.tree.to_dict(), indent=2, ensure_ascii=False),
                        encoding="utf-8")

    degraded = [d for d in session.diagnostics if "discarded" in d.get("message", "")]
    errors = [e for e in session.events if e.kind.value == "error"]
    summary = {
        "out": str(out_path),
        "nodes": session.tree.node_count(),
        "segments": len(session.segments.segments) if session.segments else 0,
        "diagnostics": len(session.diagnostics),
    }
    print(json.dumps(summary, ensure_ascii=False))
    if errors or degraded:
        for item in degraded:
            print(f"warning: {item['message']}", file=sys.stderr)
        for event in errors:
            print(f"warning: {event.payload.get('message')}", file=sys.stderr)
        print("partial output written", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _replay_step(engine: SessionEngine, session: Session, step: dict, index: int) -> None:
    op = step.get("op")
    if op == "pump":
        engine.pump(session)
    elif op == "step":
        engine.step(session, int(step.get("count", 1)))
    elif op == "pause":
        engine.pause(session)
    elif op == "resume":
        engine.resume(session)
    elif op == "feedback":
        engine.submit_feedback(session, int(step["node"]), step.get("answer"))
    elif op == "skip":
        engine.submit_feedback(session, int(step["node"]), None)
    elif op == "edit":
        engine.set_node_text(session, int(step["node"]), step["text"])
    elif op == "delete":
        engine.delete_node(session, int(step["node"]))
    elif op == "branch":
        engine.branch_out(session, int(step["node"]), step["prompt"])
    elif op == "regenerate":
        engine.regenerate_node(session, int(step["node"]))
    elif op == "collapse":
        engine.collapse_node(session, int(step["node"]))
    elif op == "expand":
        engine.expand_node(session, int(step["node"]))
    elif op == "answer":
        engine.generate_answer(session)
    else:
        raise ValueError(f"unknown op '{op}'")


def cmd_replay(args: argparse.Namespace) -> int:
    session_path = Path(args.session)
    script_path = Path(args.script)
    for path in (session_path, script_path, Path(args.fixtures)):
        if not path.exists():
            print(f"file not found: {path}", file=sys.stderr)
            return EXIT_USAGE
    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    session_doc = json.loads(session_path.read_text(encoding="utf-8"))
    prompt = session_doc.get("user_prompt")
    if not prompt:
        print("session file must carry user_prompt", file=sys.stderr)
        return EXIT_USAGE
    steps = json.loads(script_path.read_text(encoding="utf-8"))

    engine = build_engine(config, fixtures_path=args.fixtures,
                          interactive=True, run_mode="manual", with_store=False)
    session = engine.create_session(prompt)
    printed = 0
    try:
        engine.start(session)
        if args.verbose:
            printed = _print_events(session, printed)
        for index, step in enumerate(steps):
            try:
                _replay_step(engine, session, step, index)
            except (EditError, EngineError, KeyError, ValueError) as exc:
                print(f"step {index} ({step.get('op')}) failed: {exc}", file=sys.stderr)
                return EXIT_RUNTIME
            if args.verbose:
                printed = _print_events(session, printed)
        engine.pump(session)
        if args.verbose:
            _print_events(session, printed)
    except FixtureMismatch as exc:
        print(f"fixture drift for template '{exc.template_id}': {exc}", file=sys.stderr)
        return EXIT_FIXTURE_DRIFT

    print(json.dumps({"digest": event_log_digest(session)}))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import os

    import uvicorn

    from .service.app import create_app

    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    host = args.host or config.server.host
    port = args.port if args.port is not None else config.server.port

    try:
        engine = build_engine(config, fixtures_path=args.fixtures, run_mode="thread")
    except (ValueError, FileNotFoundError) as exc:
        print(f"config error: providers: {exc}", file=sys.stderr)
        return EXIT_USAGE
    token = os.environ.get(config.server.token_env)
    app = create_app(engine, token=token, cors_origin=config.server.cors_origin)

    print(f"listening on {host}:{port}", flush=True)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        print(f"cannot bind port {port}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit:
        print(f"cannot bind port {port}: address in use", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "structure":
        return cmd_structure(args)
    if args.command == "replay":
        return cmd_replay(args)
    if args.command == "serve":
        return cmd_serve(args)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
