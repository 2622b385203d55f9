"""Command-line front end.

A thin client over the service operations: every subcommand builds the
same request model the HTTP endpoint takes and renders the response.  By
default requests run in-process; ``--server URL`` sends them to a running
service instead.  ``gct serve`` starts that service.

Exit codes: 0 success, 1 law-check failure, 2 usage/parse error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from .service import ops, schemas
from .textio import ParseError

_ENDPOINTS = {
    "eval": ("/eval", ops.op_eval, schemas.EvalResponse),
    "rewrite": ("/rewrite", ops.op_rewrite, schemas.RewriteResponse),
    "check": ("/check", ops.op_check, schemas.CheckResponse),
    "ghz": ("/ghz", ops.op_ghz, schemas.GhzResponse),
    "soundness": ("/soundness", ops.op_soundness, schemas.SoundnessResponse),
}


def _dispatch(command: str, request, server: Optional[str]):
    path, fn, resp_model = _ENDPOINTS[command]
    if server is None:
        return fn(request)
    import httpx

    try:
        r = httpx.post(server.rstrip("/") + path, json=request.model_dump(),
                       timeout=120.0)
    except httpx.HTTPError as exc:
        raise ops.UsageError(f"cannot reach server {server}: {exc}") from None
    if r.status_code >= 400:
        try:
            detail = r.json().get("detail", r.text)
        except ValueError:
            detail = r.text
        raise ops.UsageError(f"server rejected request: {detail}")
    return resp_model.model_validate(r.json())


def _read_diagram(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    if not os.path.exists(path):
        raise ops.UsageError(f"no such diagram file: {path}")
    with open(path) as fh:
        return fh.read()


def _angles(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ops.UsageError(f"bad angle list {text!r}; expected e.g. "
                             "0,90,90") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gct",
        description="string-diagram engine: evaluate, rewrite, check laws, "
                    "and run the GHZ harness")
    p.add_argument("--server", help="URL of a running service; default runs "
                                    "in-process")
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="interpret a diagram file as a tensor")
    ev.add_argument("diagram", help="diagram file (.gct), or - for stdin")
    ev.add_argument("--theory", help="expected theory (checked against the "
                                     "file header)")
    ev.add_argument("--model", help="model binding name")

    rw = sub.add_parser("rewrite", help="rewrite a diagram file")
    rw.add_argument("diagram")
    rw.add_argument("--strategy", default="fuse",
                    help="fuse | nf | steps=N (default fuse)")
    rw.add_argument("--rule", help="builtin theory name or rule file for "
                                   "strategy steps")

    ck = sub.add_parser("check", help="run law checks on an observable pair")
    ck.add_argument("--pair", default="zx")
    ck.add_argument("--law", default="all")
    ck.add_argument("--k", type=int, help="exponent for --law exponent")

    gz = sub.add_parser("ghz", help="GHZ correlations, parity, LHV verdict")
    gz.add_argument("--parties", type=int, default=3)
    gz.add_argument("--angles", default="0,0,0",
                    help="comma-separated measurement angles in degrees")
    gz.add_argument("--pair", default="z2")

    sd = sub.add_parser("soundness", help="check a theory's rewrite rules "
                                          "against a model")
    sd.add_argument("--theory", default="boolcirc")
    sd.add_argument("--model", default="B")
    sd.add_argument("--samples", type=int, default=20)

    sv = sub.add_parser("serve", help="start the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    return p


def _run(args) -> int:
    tol = None
    env = os.environ.get("GCT_TOLERANCE")
    if env:
        try:
            tol = float(env)
        except ValueError:
            raise ops.UsageError(f"bad GCT_TOLERANCE value {env!r}") from None

    if args.command == "eval":
        text = _read_diagram(args.diagram)
        if args.theory and f"signature {args.theory}" not in text:
            raise ops.UsageError(
                f"diagram file does not declare theory {args.theory!r}")
        resp = _dispatch("eval", schemas.EvalRequest(
            diagram=text, model=args.model, tolerance=tol), args.server)
        print(resp.pretty)
        return 0

    if args.command == "rewrite":
        text = _read_diagram(args.diagram)
        strategy, max_steps = args.strategy, 10_000
        if strategy.startswith("steps"):
            if "=" in strategy:
                max_steps = int(strategy.split("=", 1)[1])
            strategy = "steps"
        rules = None
        if args.rule:
            rules = _read_diagram(args.rule) if os.path.exists(args.rule) \
                else args.rule
        resp = _dispatch("rewrite", schemas.RewriteRequest(
            diagram=text, strategy=strategy, rules=rules,
            max_steps=max_steps), args.server)
        sys.stdout.write(resp.diagram)
        print(f"# strategy={resp.strategy} steps={resp.steps}")
        return 0

    if args.command == "check":
        resp = _dispatch("check", schemas.CheckRequest(
            pair=args.pair, law=args.law, k=args.k, tolerance=tol),
            args.server)
        print(resp.pretty)
        return 0 if resp.passed else 1

    if args.command == "ghz":
        resp = _dispatch("ghz", schemas.GhzRequest(
            parties=args.parties, angles_degrees=_angles(args.angles),
            pair=args.pair), args.server)
        print(resp.pretty)
        return 0

    if args.command == "soundness":
        resp = _dispatch("soundness", schemas.SoundnessRequest(
            theory=args.theory, model=args.model, samples=args.samples),
            args.server)
        print(resp.pretty)
        return 0

    if args.command == "serve":
        import uvicorn

        from . import service

        uvicorn.run(service.app, host=args.host, port=args.port)
        return 0

    raise ops.UsageError(f"unknown command {args.command!r}")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ops.UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        # engine-level rejections of the input (unsupported fragment,
        # mismatched shapes, unknown names)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
