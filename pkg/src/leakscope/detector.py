"""Two-stage leak detection over enumerated control-flow paths.

Stage 1 walks each path with a counter: +1 on an acquire of the resource,
-1 on a release; a positive final count marks the path leak-risky.  Stage 2
revisits every if-statement carrying a reachability validation for the
resource, from the highest line number down, and clears the risky flags of a
branch whose paths are all risky while the sibling branch has none — such
paths only introduce false alarms.  A leak is reported when a risky path
survives both stages.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .anchoring import IntentionAnchors, validated_here
from .cfg import Cfg, NodeKind, build_cfg
from .intentions import IntentionKind, IntentionSet
from .javasrc import MethodSnippet
from .paths import (
    DEFAULT_MAX_PATHS,
    ControlFlowPath,
    enumerate_paths,
    path_intervals,
)


@dataclass
class LeakVerdict:
    """Outcome of analyzing one resource variable."""

    resource: str
    leaked: bool
    acquire_sites: tuple[int, ...]
    witness: list[str] | None = None  # line intervals of the first risky path
    witness_path_id: int | None = None

    def __post_init__(self):
        if self.leaked != (self.witness is not None):
            raise ValueError("a leak verdict carries a witness exactly when leaked")


@dataclass
class BranchPair:
    """Paths through one if-statement sharing a prefix, split by branch."""

    prefix: tuple[int, ...]
    b1: list[ControlFlowPath]
    b2: list[ControlFlowPath]

    def __post_init__(self):
        if not self.b1 or not self.b2:
            raise ValueError("both branch groups must be non-empty")


@dataclass
class LeakReport:
    resource: str
    acquire_lines: list[int]
    witness_lines: list[str]
    method_id: str

    def to_dict(self) -> dict:
        return {
            "resource": self.resource,
            "acquire_lines": list(self.acquire_lines),
            "witness_lines": list(self.witness_lines),
            "method_id": self.method_id,
        }


def stage1(
    paths: list[ControlFlowPath],
    res: str,
    intents: IntentionSet,
    cfg: Cfg,
    anchors: IntentionAnchors | None = None,
) -> list[ControlFlowPath]:
    """Mark each path risky iff its acquire count for ``res`` exceeds its
    release count.  The counter may go negative; risky tests strictly > 0."""
    marks = anchors if anchors is not None else IntentionAnchors(cfg, intents)
    for path in paths:
        counter = 0
        for nid in path.nodes:
            if marks.carries(nid, IntentionKind.ACQUIRE, res):
                counter += 1
            elif marks.carries(nid, IntentionKind.RELEASE, res):
                counter -= 1
        path.risky = counter > 0
    return paths


def propagate(pair: BranchPair) -> BranchPair:
    """Clear the risky flags of a completely risky branch whose sibling is
    completely non-risky; any other combination is left untouched."""
    b1_all = all(p.risky for p in pair.b1)
    b1_none = not any(p.risky for p in pair.b1)
    b2_all = all(p.risky for p in pair.b2)
    b2_none = not any(p.risky for p in pair.b2)
    if b1_all and b2_none:
        for p in pair.b1:
            p.risky = False
    elif b1_none and b2_all:
        for p in pair.b2:
            p.risky = False
    return pair


def stage2(
    paths: list[ControlFlowPath],
    res: str,
    intents: IntentionSet,
    cfg: Cfg,
) -> list[ControlFlowPath]:
    """Cross-path elimination of false-alarm-introducing paths.

    If-statements are processed by descending line number, so nested
    validation guards are handled inside-out.  Only if-statements matched by
    a validation intention for ``res`` take part.
    """
    if_ids = {nid for p in paths for nid in p.nodes if cfg.nodes[nid].kind is NodeKind.IF_BRANCH}
    ordered = sorted(if_ids, key=lambda nid: (cfg.nodes[nid].start, nid), reverse=True)
    for nid in ordered:
        if not validated_here(cfg.nodes[nid], intents, res):
            continue
        targets = {e.label: e.dst for e in cfg.successors(nid)}
        true_dst, false_dst = targets.get("true"), targets.get("false")
        if true_dst is None or false_dst is None or true_dst == false_dst:
            continue
        groups: dict[tuple[int, ...], tuple[list, list]] = {}
        for path in paths:
            if nid not in path.nodes:
                continue
            at = path.nodes.index(nid)  # first occurrence only
            prefix = path.nodes[: at + 1]
            following = path.nodes[at + 1]
            b1, b2 = groups.setdefault(prefix, ([], []))
            if following == true_dst:
                b1.append(path)
            elif following == false_dst:
                b2.append(path)
        for prefix, (b1, b2) in groups.items():
            if b1 and b2:
                propagate(BranchPair(prefix, b1, b2))
    return paths


def detect(
    res: str,
    paths: list[ControlFlowPath],
    intents: IntentionSet,
    cfg: Cfg,
    anchors: IntentionAnchors | None = None,
) -> LeakVerdict:
    """Run both stages for one resource and report the first risky path.

    Works on private copies of the path flags, so one shared enumeration can
    serve several resources (and threads)."""
    work = [ControlFlowPath(p.nodes, p.id) for p in paths]
    stage1(work, res, intents, cfg, anchors)
    stage2(work, res, intents, cfg)
    acquire_sites = tuple(
        sorted({i.lineno for i in intents if i.kind is IntentionKind.ACQUIRE and i.var == res})
    )
    for path in work:
        if path.risky:
            return LeakVerdict(
                resource=res,
                leaked=True,
                acquire_sites=acquire_sites,
                witness=path_intervals(cfg, path),
                witness_path_id=path.id,
            )
    return LeakVerdict(resource=res, leaked=False, acquire_sites=acquire_sites)


def analyze_method(
    snippet: MethodSnippet,
    intents: IntentionSet,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> list[LeakReport]:
    """Full per-method pipeline from intentions to leak reports.

    One detection per distinct acquired variable.  Variables declared in
    try-with-resources headers are auto-closed by the language, so verdicts
    on them are suppressed even when the provider reported an acquisition.
    """
    cfg = build_cfg(snippet)
    paths = enumerate_paths(cfg, intents, max_paths)
    anchors = IntentionAnchors(cfg, intents)
    method_id = f"{snippet.method_name}@{snippet.first_line}"
    reports: list[LeakReport] = []
    for res in intents.vars_of_kind(IntentionKind.ACQUIRE):
        if res in snippet.declared_resources:
            continue
        verdict = detect(res, paths, intents, cfg, anchors)
        if verdict.leaked:
            reports.append(
                LeakReport(
                    resource=res,
                    acquire_lines=list(verdict.acquire_sites),
                    witness_lines=list(verdict.witness or []),
                    method_id=method_id,
                )
            )
    return reports
