"""Control-flow graphs for parsed Java methods.

One node per statement (same-line simple statements are merged), plus
branch nodes that span their conditions and a virtual entry/exit pair.
Exception flow is not modeled, except that each catch block is reachable
through an alternative edge out of a dispatch node at the ``try`` keyword.
Statements of a ``finally`` block are cloned once per flow that enters the
block (normal completion, each return/throw, each crossing break/continue),
so every normal path leaving the try traverses them, returns included.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from . import javasrc as js
from .errors import JavaSyntaxError


class NodeKind(str, Enum):
    ENTRY = "entry"
    EXIT = "exit"
    STATEMENT = "statement"
    IF_BRANCH = "if-branch"
    SWITCH_BRANCH = "switch-branch"
    LOOP_HEADER = "loop-header"
    FINALLY_MEMBER = "finally-block-member"
    RETURN = "return"


@dataclass
class CfgNode:
    id: int
    kind: NodeKind
    start: int
    end: int
    label: str
    loop_kind: str | None = None  # while | do-while | for | for-each
    in_finally: bool = False
    for_part: bool = False  # init/update fragment of a for-header line


@dataclass(frozen=True)
class CfgEdge:
    src: int
    dst: int
    label: str  # seq | true | false | case | loop-body | loop-exit
    order: int = 0


class Cfg:
    def __init__(self, method_name: str, first_line: int, last_line: int):
        self.method_name = method_name
        self.first_line = first_line
        self.last_line = last_line
        self.nodes: dict[int, CfgNode] = {}
        self.edges: list[CfgEdge] = []
        self._succ: dict[int, list[CfgEdge]] = {}
        self._pred: dict[int, list[CfgEdge]] = {}
        self.entry_id: int = -1
        self.exit_id: int = -1

    def add_node(self, node: CfgNode):
        self.nodes[node.id] = node
        self._succ.setdefault(node.id, [])
        self._pred.setdefault(node.id, [])

    def remove_node(self, node_id: int):
        if self._succ.get(node_id) or self._pred.get(node_id):
            raise ValueError("refusing to remove a connected node")
        self.nodes.pop(node_id)
        self._succ.pop(node_id, None)
        self._pred.pop(node_id, None)

    def add_edge(self, src: int, dst: int, label: str, order: int = 0):
        edge = CfgEdge(src, dst, label, order)
        self.edges.append(edge)
        self._succ[src].append(edge)
        self._pred[dst].append(edge)

    def successors(self, node_id: int) -> list[CfgEdge]:
        return sorted(self._succ[node_id], key=lambda e: e.order)

    def predecessors(self, node_id: int) -> list[CfgEdge]:
        return list(self._pred[node_id])

    def node_ids(self) -> list[int]:
        return sorted(self.nodes)

    def dump(self) -> str:
        """Text form of the node and edge lists, for debugging."""
        out = [f"cfg {self.method_name} entry={self.entry_id} exit={self.exit_id}"]
        for nid in self.node_ids():
            n = self.nodes[nid]
            span = f"{n.start}" if n.start == n.end else f"{n.start}-{n.end}"
            suffix = " [finally]" if n.in_finally else ""
            label = f": {n.label}" if n.label else ""
            out.append(f"node {n.id} {n.kind.value} lines {span}{suffix}{label}")
        for nid in self.node_ids():
            for e in self.successors(nid):
                out.append(f"edge {e.src} -{e.label}-> {e.dst}")
        return "\n".join(out)


# ---------------------------------------------------------------------------
# Builder


@dataclass(frozen=True)
class _LoopFrame:
    kind: str  # loop | switch | block
    label: str | None
    break_ends: list  # mutated in place
    continue_target: int | None
    finally_count: int


@dataclass(frozen=True)
class _FinallyFrame:
    block: js.Block
    loops: tuple[_LoopFrame, ...]


@dataclass(frozen=True)
class _Ctx:
    finally_frames: tuple[_FinallyFrame, ...] = ()
    loops: tuple[_LoopFrame, ...] = ()
    in_finally: bool = False


_Pending = list[tuple[int, str, int]]  # (src id, edge label, successor order)


class _Builder:
    def __init__(self, snippet: js.MethodSnippet):
        self.snippet = snippet
        self.cfg = Cfg(snippet.method_name, snippet.first_line, snippet.last_line)
        self._next_id = 0

    def _new_node(self, kind: NodeKind, start: int, end: int, label: str, **kw) -> CfgNode:
        node = CfgNode(self._next_id, kind, start, end, _short(label), **kw)
        self._next_id += 1
        self.cfg.add_node(node)
        return node

    def _connect(self, pending: _Pending, target: int):
        for src, label, order in pending:
            self.cfg.add_edge(src, target, label, order)

    def build(self) -> Cfg:
        snip = self.snippet
        entry = self._new_node(NodeKind.ENTRY, snip.first_line, snip.signature_end_line, "entry")
        self.cfg.entry_id = entry.id
        exit_node = self._new_node(NodeKind.EXIT, snip.last_line, snip.last_line, "exit")
        self.cfg.exit_id = exit_node.id
        pending = self._block(snip.body, [(entry.id, "seq", 0)], _Ctx())
        self._connect(pending, exit_node.id)
        return self.cfg

    # -- flow threading -------------------------------------------------------

    def _block(self, block, pending: _Pending, ctx: _Ctx) -> _Pending:
        statements = block.statements if isinstance(block, js.Block) else block
        for stmt in statements:
            if not pending:
                break  # unreachable code after a jump is dropped
            pending = self._stmt(stmt, pending, ctx)
        return pending

    def _stmt(self, s: js.Stmt, pending: _Pending, ctx: _Ctx, label: str | None = None) -> _Pending:
        if isinstance(s, js.SimpleStmt):
            return self._simple(pending, s.start, s.end, s.text, ctx)
        if isinstance(s, js.BlockStmt):
            return self._block(s.body, pending, ctx)
        if isinstance(s, js.IfStmt):
            return self._if(s, pending, ctx)
        if isinstance(s, js.WhileStmt):
            return self._while(s, pending, ctx, label)
        if isinstance(s, js.DoWhileStmt):
            return self._do_while(s, pending, ctx, label)
        if isinstance(s, js.ForStmt):
            return self._for(s, pending, ctx, label)
        if isinstance(s, js.ForEachStmt):
            return self._for_each(s, pending, ctx, label)
        if isinstance(s, js.SwitchStmt):
            return self._switch(s, pending, ctx, label)
        if isinstance(s, js.TryStmt):
            return self._try(s, pending, ctx)
        if isinstance(s, js.SyncStmt):
            header = self._simple(pending, s.header_start, s.header_end, s.text, ctx)
            return self._block(s.body, header, ctx)
        if isinstance(s, (js.ReturnStmt, js.ThrowStmt)):
            node = self._new_node(NodeKind.RETURN, s.start, s.end, s.text, in_finally=ctx.in_finally)
            self._connect(pending, node.id)
            self._route_procedural_exit(node.id, ctx)
            return []
        if isinstance(s, js.BreakStmt):
            return self._break(s, pending, ctx)
        if isinstance(s, js.ContinueStmt):
            return self._continue(s, pending, ctx)
        if isinstance(s, js.LabeledStmt):
            return self._labeled(s, pending, ctx)
        raise AssertionError(f"unhandled statement type {type(s).__name__}")

    def _simple(self, pending: _Pending, start: int, end: int, text: str, ctx: _Ctx) -> _Pending:
        kind = NodeKind.FINALLY_MEMBER if ctx.in_finally else NodeKind.STATEMENT
        if len(pending) == 1 and pending[0][1] == "seq":
            prev = self.cfg.nodes.get(pending[0][0])
            if prev is not None and prev.kind is kind and prev.end >= start:
                # statements sharing a line collapse into one node
                prev.end = max(prev.end, end)
                prev.label = _short(f"{prev.label}; {text}")
                return pending
        node = self._new_node(kind, start, end, text, in_finally=ctx.in_finally)
        self._connect(pending, node.id)
        return [(node.id, "seq", 0)]

    def _if(self, s: js.IfStmt, pending: _Pending, ctx: _Ctx) -> _Pending:
        cond = self._new_node(
            NodeKind.IF_BRANCH, s.cond_start, s.cond_end, f"if ({s.cond_text})",
            in_finally=ctx.in_finally,
        )
        self._connect(pending, cond.id)
        then_p = self._block(s.then_block, [(cond.id, "true", 0)], ctx)
        if s.else_block is not None:
            else_p = self._block(s.else_block, [(cond.id, "false", 1)], ctx)
        else:
            else_p = [(cond.id, "false", 1)]
        return then_p + else_p

    def _loop_body(self, header: CfgNode, body: js.Block, ctx: _Ctx, frame: _LoopFrame) -> _Pending:
        inner = replace(ctx, loops=ctx.loops + (frame,))
        return self._block(body, [(header.id, "loop-body", 0)], inner)

    def _while(self, s: js.WhileStmt, pending: _Pending, ctx: _Ctx, label: str | None) -> _Pending:
        header = self._new_node(
            NodeKind.LOOP_HEADER, s.cond_start, s.cond_end, f"while ({s.cond_text})",
            loop_kind="while", in_finally=ctx.in_finally,
        )
        self._connect(pending, header.id)
        frame = _LoopFrame("loop", label, [], header.id, len(ctx.finally_frames))
        body_p = self._loop_body(header, s.body, ctx, frame)
        self._connect(body_p, header.id)
        return [(header.id, "loop-exit", 1)] + frame.break_ends

    def _for(self, s: js.ForStmt, pending: _Pending, ctx: _Ctx, label: str | None) -> _Pending:
        kind = NodeKind.FINALLY_MEMBER if ctx.in_finally else NodeKind.STATEMENT
        if s.init_text:
            init = self._new_node(
                kind, s.init_start, s.init_end, s.init_text,
                in_finally=ctx.in_finally, for_part=True,
            )
            self._connect(pending, init.id)
            pending = [(init.id, "seq", 0)]
        cond_label = f"for-cond ({s.cond_text})" if s.cond_text else "for-cond (true)"
        header = self._new_node(
            NodeKind.LOOP_HEADER, s.cond_start, s.cond_end, cond_label,
            loop_kind="for", in_finally=ctx.in_finally,
        )
        self._connect(pending, header.id)
        update = None
        if s.update_text:
            update = self._new_node(
                kind, s.update_start, s.update_end, s.update_text,
                in_finally=ctx.in_finally, for_part=True,
            )
        cont_target = update.id if update is not None else header.id
        frame = _LoopFrame("loop", label, [], cont_target, len(ctx.finally_frames))
        body_p = self._loop_body(header, s.body, ctx, frame)
        if update is not None:
            if body_p or self.cfg.predecessors(update.id):
                self._connect(body_p, update.id)
                self.cfg.add_edge(update.id, header.id, "seq", 0)
            else:
                self.cfg.remove_node(update.id)
        else:
            self._connect(body_p, header.id)
        return [(header.id, "loop-exit", 1)] + frame.break_ends

    def _for_each(self, s: js.ForEachStmt, pending: _Pending, ctx: _Ctx, label: str | None) -> _Pending:
        header = self._new_node(
            NodeKind.LOOP_HEADER, s.header_start, s.header_end, f"for ({s.header_text})",
            loop_kind="for-each", in_finally=ctx.in_finally,
        )
        self._connect(pending, header.id)
        frame = _LoopFrame("loop", label, [], header.id, len(ctx.finally_frames))
        body_p = self._loop_body(header, s.body, ctx, frame)
        self._connect(body_p, header.id)
        return [(header.id, "loop-exit", 1)] + frame.break_ends

    def _do_while(self, s: js.DoWhileStmt, pending: _Pending, ctx: _Ctx, label: str | None) -> _Pending:
        cond = self._new_node(
            NodeKind.LOOP_HEADER, s.cond_start, s.cond_end, f"do-while ({s.cond_text})",
            loop_kind="do-while", in_finally=ctx.in_finally,
        )
        frame = _LoopFrame("loop", label, [], cond.id, len(ctx.finally_frames))
        inner = replace(ctx, loops=ctx.loops + (frame,))
        edge_mark = len(self.cfg.edges)
        entry_keys = {(src, lab) for src, lab, _ in pending}
        body_p = self._block(s.body, pending, inner)
        body_entry = None
        for edge in self.cfg.edges[edge_mark:]:
            if (edge.src, edge.label) in entry_keys:
                body_entry = edge.dst
                break
        self._connect(body_p, cond.id)
        if body_entry is not None and body_entry != cond.id:
            # structural back edge; never traversed during enumeration
            self.cfg.add_edge(cond.id, body_entry, "loop-body", 0)
        return [(cond.id, "loop-exit", 1)] + frame.break_ends

    def _switch(self, s: js.SwitchStmt, pending: _Pending, ctx: _Ctx, label: str | None) -> _Pending:
        sel = self._new_node(
            NodeKind.SWITCH_BRANCH, s.selector_start, s.selector_end,
            f"switch ({s.selector_text})", in_finally=ctx.in_finally,
        )
        self._connect(pending, sel.id)
        frame = _LoopFrame("switch", label, [], None, len(ctx.finally_frames))
        inner = replace(ctx, loops=ctx.loops + (frame,))
        flow: _Pending = []
        for i, case in enumerate(s.cases):
            flow = self._block(case.body, flow + [(sel.id, "case", i)], inner)
        result = flow + frame.break_ends
        if not any(c.has_default for c in s.cases):
            result = result + [(sel.id, "case", len(s.cases))]
        return result

    def _try(self, s: js.TryStmt, pending: _Pending, ctx: _Ctx) -> _Pending:
        for res in s.resources:
            pending = self._simple(pending, res.line, res.line, res.text, ctx)
        inner_ctx = ctx
        if s.finally_block is not None:
            frame = _FinallyFrame(s.finally_block, ctx.loops)
            inner_ctx = replace(ctx, finally_frames=ctx.finally_frames + (frame,))
        if s.catches:
            disp = self._new_node(
                NodeKind.SWITCH_BRANCH, s.keyword_line, s.keyword_line, "try",
                in_finally=ctx.in_finally,
            )
            self._connect(pending, disp.id)
            normals = self._block(s.body, [(disp.id, "seq", 0)], inner_ctx)
            for idx, cat in enumerate(s.catches):
                normals = normals + self._block(cat.body, [(disp.id, "case", idx + 1)], inner_ctx)
        else:
            normals = self._block(s.body, pending, inner_ctx)
        if s.finally_block is not None and normals:
            normals = self._block(s.finally_block, normals, replace(ctx, in_finally=True))
        return normals

    def _labeled(self, s: js.LabeledStmt, pending: _Pending, ctx: _Ctx) -> _Pending:
        if s.inner is None:
            return pending
        if isinstance(
            s.inner,
            (js.WhileStmt, js.DoWhileStmt, js.ForStmt, js.ForEachStmt, js.SwitchStmt),
        ):
            return self._stmt(s.inner, pending, ctx, label=s.label)
        frame = _LoopFrame("block", s.label, [], None, len(ctx.finally_frames))
        inner = replace(ctx, loops=ctx.loops + (frame,))
        out = self._stmt(s.inner, pending, inner)
        return out + frame.break_ends

    # -- jumps ----------------------------------------------------------------

    def _unwind(self, node_id: int, ctx: _Ctx, down_to: int) -> _Pending:
        """Route flow out of ``node_id`` through finally copies above ``down_to``."""
        pending: _Pending = [(node_id, "seq", 0)]
        frames = ctx.finally_frames
        for i in range(len(frames) - 1, down_to - 1, -1):
            fr = frames[i]
            copy_ctx = _Ctx(finally_frames=frames[:i], loops=fr.loops, in_finally=True)
            pending = self._block(fr.block, pending, copy_ctx)
            if not pending:
                return []
        return pending

    def _route_procedural_exit(self, node_id: int, ctx: _Ctx):
        pending = self._unwind(node_id, ctx, 0)
        self._connect(pending, self.cfg.exit_id)

    def _find_frame(self, ctx: _Ctx, want_label: str | None, kinds: tuple[str, ...], line: int, what: str) -> _LoopFrame:
        for frame in reversed(ctx.loops):
            if want_label is not None:
                if frame.label == want_label:
                    return frame
            elif frame.kind in kinds:
                return frame
        raise JavaSyntaxError(f"{what} target not found", line)

    def _break(self, s: js.BreakStmt, pending: _Pending, ctx: _Ctx) -> _Pending:
        node_p = self._simple(pending, s.start, s.end, s.text, ctx)
        frame = self._find_frame(ctx, s.target_label, ("loop", "switch"), s.start, "break")
        ends = self._unwind(node_p[0][0], ctx, frame.finally_count)
        frame.break_ends.extend(ends)
        return []

    def _continue(self, s: js.ContinueStmt, pending: _Pending, ctx: _Ctx) -> _Pending:
        node_p = self._simple(pending, s.start, s.end, s.text, ctx)
        frame = self._find_frame(ctx, s.target_label, ("loop",), s.start, "continue")
        if frame.continue_target is None:
            raise JavaSyntaxError("continue target is not a loop", s.start)
        ends = self._unwind(node_p[0][0], ctx, frame.finally_count)
        self._connect(ends, frame.continue_target)
        return []


def _short(text: str, limit: int = 72) -> str:
    flat = " ".join(text.split())
    return flat if len(flat) <= limit else flat[: limit - 3] + "..."


def build_cfg(snippet: js.MethodSnippet, validate: bool = True) -> Cfg:
    """Construct the control-flow graph of a parsed method.

    Pure function of the snippet text; the result is immutable by convention
    and safe to share.
    """
    cfg = _Builder(snippet).build()
    if validate:
        validate_cfg(cfg)
    return cfg


def _reachable(cfg: Cfg, start: int, forward: bool) -> set[int]:
    seen = {start}
    work = [start]
    while work:
        nid = work.pop()
        edges = cfg._succ[nid] if forward else cfg._pred[nid]
        for e in edges:
            nxt = e.dst if forward else e.src
            if nxt not in seen:
                seen.add(nxt)
                work.append(nxt)
    return seen


def validate_cfg(cfg: Cfg):
    """Check the structural invariants; raises ``ValueError`` on violation."""
    kinds = [n.kind for n in cfg.nodes.values()]
    if kinds.count(NodeKind.ENTRY) != 1 or kinds.count(NodeKind.EXIT) != 1:
        raise ValueError("cfg must have exactly one entry and one exit")
    from_entry = _reachable(cfg, cfg.entry_id, forward=True)
    to_exit = _reachable(cfg, cfg.exit_id, forward=False)
    for n in cfg.nodes.values():
        if n.id not in from_entry or n.id not in to_exit:
            raise ValueError(f"node {n.id} ({n.label}) is not on any entry-exit walk")
        out = len(cfg._succ[n.id])
        if n.kind is NodeKind.IF_BRANCH:
            labels = sorted(e.label for e in cfg._succ[n.id])
            if out != 2 or labels != ["false", "true"]:
                raise ValueError(f"if node {n.id} must have exactly true/false successors")
        elif n.kind in (NodeKind.STATEMENT, NodeKind.FINALLY_MEMBER, NodeKind.RETURN, NodeKind.ENTRY):
            if out != 1:
                raise ValueError(f"{n.kind.value} node {n.id} must have exactly one successor")
        elif n.kind is NodeKind.EXIT and out != 0:
            raise ValueError("exit node must have no successors")
    statements = [
        n for n in cfg.nodes.values() if n.kind is NodeKind.STATEMENT and not n.for_part
    ]
    for i, a in enumerate(statements):
        for b in statements[i + 1 :]:
            if a.start <= b.end and b.start <= a.end:
                fwd = _reachable(cfg, a.id, forward=True)
                if b.id in fwd or a.id in _reachable(cfg, b.id, forward=True):
                    raise ValueError(
                        f"statement nodes {a.id} and {b.id} overlap on a common path"
                    )


def immediate_postdominators(cfg: Cfg) -> dict[int, int]:
    """Immediate postdominator of every node (exit maps to itself)."""
    ids = cfg.node_ids()
    all_ids = set(ids)
    pdom: dict[int, set[int]] = {nid: set(all_ids) for nid in ids}
    pdom[cfg.exit_id] = {cfg.exit_id}
    changed = True
    while changed:
        changed = False
        for nid in ids:
            if nid == cfg.exit_id:
                continue
            succ = [e.dst for e in cfg._succ[nid]]
            new = set.intersection(*(pdom[s] for s in succ)) | {nid} if succ else {nid}
            if new != pdom[nid]:
                pdom[nid] = new
                changed = True
    ipdom: dict[int, int] = {cfg.exit_id: cfg.exit_id}
    for nid in ids:
        if nid == cfg.exit_id:
            continue
        candidates = pdom[nid] - {nid}
        ipdom[nid] = max(candidates, key=lambda c: len(pdom[c])) if candidates else nid
    return ipdom
