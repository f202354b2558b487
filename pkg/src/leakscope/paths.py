"""Entry-to-exit path enumeration with loop and branch pruning.

Loops are expanded at most once per path: while/for loops contribute a
zero-iteration and a one-iteration variant, do-while only the one-iteration
variant.  Branches whose alternatives neither touch a resource (per the
inferred intentions) nor leave the procedure collapse to their first
alternative, since all of them show the same acquire/release behavior.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .anchoring import IntentionAnchors
from .cfg import Cfg, CfgEdge, NodeKind, immediate_postdominators
from .errors import PathExplosionError
from .intentions import IntentionSet

DEFAULT_MAX_PATHS = 4096

_PRUNABLE_KINDS = (NodeKind.IF_BRANCH, NodeKind.SWITCH_BRANCH)


@dataclass
class ControlFlowPath:
    """Ordered node-id walk from entry to exit."""

    nodes: tuple[int, ...]
    id: int
    risky: bool = False

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.nodes


def _branch_region(cfg: Cfg, branch_id: int, first: int, join: int) -> set[int]:
    """Nodes of one branch alternative: reachable from its first node
    without passing through the join point."""
    if first == join:
        return set()
    seen = {first}
    work = [first]
    while work:
        nid = work.pop()
        for edge in cfg._succ[nid]:
            if edge.dst in (join, branch_id):
                continue
            if edge.dst not in seen:
                seen.add(edge.dst)
                work.append(edge.dst)
    return seen


def _successor_plan(cfg: Cfg, anchors: IntentionAnchors | None) -> dict[int, list[CfgEdge]]:
    """Ordered successors per node; prunable branches keep only their first."""
    plan: dict[int, list[CfgEdge]] = {}
    ipdom = immediate_postdominators(cfg) if anchors is not None else {}
    for nid in cfg.nodes:
        edges = cfg.successors(nid)
        if (
            anchors is not None
            and len(edges) > 1
            and cfg.nodes[nid].kind in _PRUNABLE_KINDS
            and _branches_are_resource_independent(cfg, anchors, nid, edges, ipdom[nid])
        ):
            edges = edges[:1]
        plan[nid] = edges
    return plan


def _branches_are_resource_independent(
    cfg: Cfg, anchors: IntentionAnchors, nid: int, edges: list[CfgEdge], join: int
) -> bool:
    for edge in edges:
        for member in _branch_region(cfg, nid, edge.dst, join):
            if anchors.touches_resources(member):
                return False
            if cfg.nodes[member].kind is NodeKind.RETURN:
                return False
    return True


def _walk(cfg: Cfg, plan: dict[int, list[CfgEdge]], loop_bound: int, max_paths: int) -> list[ControlFlowPath]:
    exit_id = cfg.exit_id
    paths: list[ControlFlowPath] = []
    visit_cap = loop_bound + 1
    counts: dict[int, int] = defaultdict(int)
    body_used: dict[int, int] = defaultdict(int)
    trail: list[int] = []

    def step(nid: int):
        if counts[nid] >= visit_cap:
            return
        counts[nid] += 1
        trail.append(nid)
        if nid == exit_id:
            if len(paths) >= max_paths:
                raise PathExplosionError(max_paths)
            paths.append(ControlFlowPath(tuple(trail), len(paths)))
        else:
            for edge in plan[nid]:
                if edge.label == "loop-body":
                    allowance = loop_bound
                    if cfg.nodes[nid].loop_kind == "do-while":
                        allowance -= 1  # the body already ran once by falling in
                    if body_used[nid] >= allowance:
                        continue
                    body_used[nid] += 1
                    step(edge.dst)
                    body_used[nid] -= 1
                else:
                    step(edge.dst)
        trail.pop()
        counts[nid] -= 1

    step(cfg.entry_id)
    return paths


def enumerate_paths(
    cfg: Cfg, intents: IntentionSet, max_paths: int = DEFAULT_MAX_PATHS
) -> list[ControlFlowPath]:
    """All pruned entry-to-exit paths, deterministically ordered.

    Ordering follows branch-label order at every node (true/first case before
    the alternatives, loop body before loop exit).  Raises
    :class:`PathExplosionError` past ``max_paths``.
    """
    anchors = IntentionAnchors(cfg, intents)
    return _walk(cfg, _successor_plan(cfg, anchors), 1, max_paths)


def enumerate_exhaustive(
    cfg: Cfg, loop_bound: int = 1, max_paths: int = DEFAULT_MAX_PATHS
) -> list[ControlFlowPath]:
    """Every path with at most ``loop_bound`` loop-body traversals.

    No branch pruning; serves as the reference enumeration for testing the
    pruned one.
    """
    if loop_bound < 1:
        raise ValueError("loop_bound must be >= 1")
    return _walk(cfg, _successor_plan(cfg, None), loop_bound, max_paths)


def path_intervals(cfg: Cfg, path: ControlFlowPath) -> list[str]:
    """Line-interval segments of a path, split at branch and join points.

    A two-way branch over lines 160-190 renders as ``160-185, 186, 187-190``
    style segments.
    """
    segments: list[list[int]] = []
    current: list[int] | None = None
    prev: int | None = None
    for nid in path.nodes:
        node = cfg.nodes[nid]
        boundary = False
        if prev is not None:
            if len(cfg._succ[prev]) > 1 or len(cfg._pred[nid]) > 1:
                boundary = True
        if (
            current is None
            or boundary
            or node.start > current[1] + 1
            or node.start < current[0]
        ):
            if current is not None:
                segments.append(current)
            current = [node.start, node.end]
        else:
            current[1] = max(current[1], node.end)
        prev = nid
    if current is not None:
        segments.append(current)
    return [f"{a}-{b}" if a != b else f"{a}" for a, b in segments]


def format_path(cfg: Cfg, path: ControlFlowPath) -> str:
    """Bracketed interval-list form, e.g. ``[160-185, 186, 187-190]``."""
    return "[" + ", ".join(path_intervals(cfg, path)) + "]"
