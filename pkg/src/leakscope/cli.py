"""Command-line entry point: scan Java files for resource leaks.

Exit status follows linter convention: 0 when clean, 1 when at least one
leak was reported, 2 on an operational error (unreadable input, parse
failure, provider failure).  Report output is deterministic for the
offline providers: byte-identical across runs and job counts.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .cfg import build_cfg
from .detector import LeakReport, analyze_method
from .errors import LeakScopeError
from .javasrc import parse_method, scan_file
from .paths import DEFAULT_MAX_PATHS, enumerate_paths, format_path
from .providers import ProviderConfig, infer, make_provider

_PROVIDER_BY_FLAG = {
    "remote": "remote-chat",
    "rules": "rule-based",
    "fixture": "fixture",
}


@dataclass
class RunConfig:
    inputs: list[str]
    method: str | None = None
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    output_format: str = "text"
    max_paths: int = DEFAULT_MAX_PATHS
    jobs: int = 1
    dump_cfg: bool = False
    dump_paths: bool = False

    def __post_init__(self):
        if self.max_paths < 1:
            raise ValueError("path ceiling must be >= 1")
        if self.output_format not in ("text", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")


def _collect_files(inputs: list[str], errors: list[str]) -> list[Path]:
    files: list[Path] = []
    for raw in inputs:
        path = Path(raw)
        if path.is_file():
            files.append(path)
        elif path.is_dir():
            files.extend(sorted(path.rglob("*.java")))
        else:
            errors.append(f"{raw}: no such file or directory")
    return files


def _selected(method: str | None, name: str, first_line: int, source: str) -> bool:
    if method is None:
        return True
    if method.isdigit():
        last_line = first_line + source.count("\n")
        return first_line <= int(method) <= last_line
    return name == method


@dataclass
class _MethodResult:
    file: Path
    first_line: int
    reports: list[LeakReport] = field(default_factory=list)
    error: str | None = None
    debug: str = ""


def _analyze_one(config: RunConfig, provider, file: Path, name: str, first_line: int, source: str) -> _MethodResult:
    result = _MethodResult(file, first_line)
    debug: list[str] = []
    try:
        snippet = parse_method(source, first_line)
        intents = infer(snippet, config.provider, provider)
        if config.dump_cfg:
            debug.append(build_cfg(snippet).dump())
        if config.dump_paths:
            cfg = build_cfg(snippet)
            for path in enumerate_paths(cfg, intents, config.max_paths):
                debug.append(f"{file}:{name}@{first_line} path {format_path(cfg, path)}")
        result.reports = analyze_method(snippet, intents, config.max_paths)
    except LeakScopeError as exc:
        line = getattr(exc, "line", first_line)
        result.error = f"{file}:{line}: {exc}"
    result.debug = "\n".join(debug)
    return result


def run(config: RunConfig, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    errors: list[str] = []
    files = _collect_files(config.inputs, errors)

    tasks = []
    for file in files:
        try:
            text = file.read_text()
        except OSError as exc:
            errors.append(f"{file}: {exc}")
            continue
        for name, first_line, source in scan_file(text):
            if _selected(config.method, name, first_line, source):
                tasks.append((file, name, first_line, source))

    provider = make_provider(config.provider)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(
                pool.map(lambda t: _analyze_one(config, provider, *t), tasks)
            )
    else:
        results = [_analyze_one(config, provider, *t) for t in tasks]

    results.sort(key=lambda r: (str(r.file), r.first_line))
    reports: list[tuple[Path, LeakReport]] = []
    for res in results:
        if res.debug:
            print(res.debug, file=err)
        if res.error:
            errors.append(res.error)
        for report in sorted(res.reports, key=lambda r: r.resource):
            reports.append((res.file, report))

    for file, report in reports:
        if config.output_format == "json":
            payload = {"file": str(file), **report.to_dict()}
            print(json.dumps(payload, sort_keys=True), file=out)
        else:
            acquired = ", ".join(str(n) for n in report.acquire_lines)
            witness = ", ".join(report.witness_lines)
            print(
                f"{file}: leak of '{report.resource}' in {report.method_id}"
                f" (acquired at line {acquired}; risky path [{witness}])",
                file=out,
            )

    for diag in errors:
        print(f"error: {diag}", file=err)
    if errors:
        return 2
    return 1 if reports else 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leakscope",
        description="Detect resource leaks in Java methods from inferred"
        " acquire/release/validate intentions.",
    )
    parser.add_argument("--input", action="append", required=True,
                        help="Java file or directory to scan (repeatable)")
    parser.add_argument("--method", default=None,
                        help="only analyze the method with this name, or containing this line")
    parser.add_argument("--provider", choices=sorted(_PROVIDER_BY_FLAG), default="rules",
                        help="intention provider (default: rules)")
    parser.add_argument("--fixture-file", default=None,
                        help="canned-answer table for --provider fixture")
    parser.add_argument("--model", default="gpt-4", help="remote model name")
    parser.add_argument("--endpoint", default=None, help="remote chat-completion endpoint")
    parser.add_argument("--cache-dir", default=None, help="directory for cached provider answers")
    parser.add_argument("--format", choices=("text", "json"), default="text",
                        dest="output_format", help="report format (json = one object per line)")
    parser.add_argument("--max-paths", type=int, default=DEFAULT_MAX_PATHS,
                        help="path-enumeration ceiling per method")
    parser.add_argument("--jobs", type=int, default=1, help="concurrent method analyses")
    parser.add_argument("--dump-cfg", action="store_true", help="print each CFG to stderr")
    parser.add_argument("--dump-paths", action="store_true",
                        help="print enumerated paths to stderr")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    provider_kw = {
        "kind": _PROVIDER_BY_FLAG[args.provider],
        "model": args.model,
        "cache_dir": args.cache_dir,
        "fixture_file": args.fixture_file,
    }
    if args.endpoint:
        provider_kw["endpoint"] = args.endpoint
    return RunConfig(
        inputs=args.input,
        method=args.method,
        provider=ProviderConfig(**provider_kw),
        output_format=args.output_format,
        max_paths=args.max_paths,
        jobs=args.jobs,
        dump_cfg=args.dump_cfg,
        dump_paths=args.dump_paths,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ValueError, LeakScopeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
