"""Resolution of intention line numbers to CFG nodes.

Providers attribute intentions to lines; the analysis works on nodes.  The
mapping is direct containment in a statement-like node's span, with one
tolerance: an acquire/release reported on an if-condition line is carried by
the first statement guarded by that condition (adjacent line), and an
if-statement accepts a validation reported one line past its condition span.
Both tolerances absorb the familiar off-by-one slips in provider output for
``if (x != null) <release>;`` shapes.
"""

from __future__ import annotations

from .cfg import Cfg, CfgNode, NodeKind
from .intentions import IntentionKind, IntentionSet

_DIRECT_KINDS = (NodeKind.STATEMENT, NodeKind.RETURN, NodeKind.FINALLY_MEMBER)
_CONDITION_KINDS = (NodeKind.LOOP_HEADER, NodeKind.SWITCH_BRANCH)


class IntentionAnchors:
    """Where each acquire/release intention lands in a given CFG."""

    def __init__(self, cfg: Cfg, intents: IntentionSet):
        self._marks: dict[int, set[tuple[IntentionKind, str]]] = {}
        nodes = list(cfg.nodes.values())
        for intent in intents:
            if intent.kind is IntentionKind.VALIDATE:
                continue
            for node in _anchor_nodes(cfg, nodes, intent.lineno):
                self._marks.setdefault(node.id, set()).add((intent.kind, intent.var))

    def marks(self, node_id: int) -> set[tuple[IntentionKind, str]]:
        return self._marks.get(node_id, set())

    def carries(self, node_id: int, kind: IntentionKind, var: str) -> bool:
        return (kind, var) in self._marks.get(node_id, ())

    def touches_resources(self, node_id: int) -> bool:
        """True when any acquire/release intention lands on the node."""
        return bool(self._marks.get(node_id))


def _contains(node: CfgNode, lineno: int) -> bool:
    return node.start <= lineno <= node.end


def _anchor_nodes(cfg: Cfg, nodes: list[CfgNode], lineno: int) -> list[CfgNode]:
    direct = [n for n in nodes if n.kind in _DIRECT_KINDS and _contains(n, lineno)]
    for_parts = [n for n in direct if n.for_part]
    if len(for_parts) > 1:
        # init and update fragments share the for-header line; count one only
        keep = min(for_parts, key=lambda n: n.id)
        direct = [n for n in direct if not n.for_part or n is keep]
    if direct:
        return direct
    anchored: list[CfgNode] = []
    for branch in (n for n in nodes if n.kind is NodeKind.IF_BRANCH and _contains(n, lineno)):
        target = _guarded_statement(cfg, branch)
        if target is not None and target.start in (lineno, lineno + 1):
            anchored.append(target)
        else:
            anchored.append(branch)
    if anchored:
        return anchored
    return [n for n in nodes if n.kind in _CONDITION_KINDS and _contains(n, lineno)]


def _guarded_statement(cfg: Cfg, branch: CfgNode) -> CfgNode | None:
    """First statement of the true branch, when it belongs to that branch alone."""
    for edge in cfg.successors(branch.id):
        if edge.label == "true":
            target = cfg.nodes[edge.dst]
            if target.kind in _DIRECT_KINDS and len(cfg.predecessors(target.id)) == 1:
                return target
            return None
    return None


def validated_here(node: CfgNode, intents: IntentionSet, var: str) -> bool:
    """Whether a validation intention for ``var`` matches this if-statement.

    The intention line may fall anywhere in the condition span, or one line
    past it.
    """
    if node.kind is not NodeKind.IF_BRANCH:
        return False
    for intent in intents:
        if (
            intent.kind is IntentionKind.VALIDATE
            and intent.var == var
            and node.start <= intent.lineno <= node.end + 1
        ):
            return True
    return False
