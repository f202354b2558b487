"""Java method parsing at statement granularity.

Parses one method declaration (or a lone body block) into a statement tree
with original-file line spans.  No renumbering happens anywhere: every span
refers to lines of the file the method came from, offset by ``first_line``.
Expression internals are kept as raw text slices; only statement structure
is modeled, which is all the control-flow analysis needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import JavaSyntaxError, UnsupportedConstructError

_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

_CONTROL_KEYWORDS = frozenset(
    {"if", "else", "for", "while", "do", "switch", "case", "try", "catch", "finally"}
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | str | char | punct
    text: str
    line: int
    start: int
    end: int


def tokenize(source: str, first_line: int = 1) -> list[Token]:
    toks: list[Token] = []
    i, n, line = 0, len(source), first_line
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            i += 1
        elif c.isspace():
            i += 1
        elif c == "/" and source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j < 0 else j
        elif c == "/" and source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j < 0:
                raise JavaSyntaxError("unterminated block comment", line)
            line += source.count("\n", i, j)
            i = j + 2
        elif source.startswith('"""', i):
            j = source.find('"""', i + 3)
            if j < 0:
                raise JavaSyntaxError("unterminated text block", line)
            start_line = line
            line += source.count("\n", i, j)
            toks.append(Token("str", source[i : j + 3], start_line, i, j + 3))
            i = j + 3
        elif c == '"' or c == "'":
            j = i + 1
            while j < n and source[j] != c:
                if source[j] == "\\":
                    j += 1
                elif source[j] == "\n":
                    raise JavaSyntaxError("unterminated literal", line)
                j += 1
            if j >= n:
                raise JavaSyntaxError("unterminated literal", line)
            toks.append(Token("str" if c == '"' else "char", source[i : j + 1], line, i, j + 1))
            i = j + 1
        elif c.isalpha() or c in "_$":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "_$"):
                j += 1
            toks.append(Token("ident", source[i:j], line, i, j))
            i = j
        elif c.isdigit():
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "._"):
                j += 1
            toks.append(Token("num", source[i:j], line, i, j))
            i = j
        elif c == "-" and source.startswith("->", i):
            toks.append(Token("punct", "->", line, i, i + 2))
            i += 2
        elif c == ":" and source.startswith("::", i):
            toks.append(Token("punct", "::", line, i, i + 2))
            i += 2
        else:
            toks.append(Token("punct", c, line, i, i + 1))
            i += 1
    return toks


# ---------------------------------------------------------------------------
# Statement tree


@dataclass
class Stmt:
    start: int
    end: int
    text: str


@dataclass
class SimpleStmt(Stmt):
    pass


@dataclass
class ReturnStmt(Stmt):
    pass


@dataclass
class ThrowStmt(Stmt):
    pass


@dataclass
class BreakStmt(Stmt):
    target_label: str | None = None


@dataclass
class ContinueStmt(Stmt):
    target_label: str | None = None


@dataclass
class Block:
    statements: list[Stmt] = field(default_factory=list)


@dataclass
class BlockStmt(Stmt):
    body: Block = field(default_factory=Block)


@dataclass
class IfStmt(Stmt):
    cond_text: str = ""
    cond_start: int = 0
    cond_end: int = 0
    then_block: Block = field(default_factory=Block)
    else_block: Block | None = None


@dataclass
class WhileStmt(Stmt):
    cond_text: str = ""
    cond_start: int = 0
    cond_end: int = 0
    body: Block = field(default_factory=Block)


@dataclass
class DoWhileStmt(Stmt):
    cond_text: str = ""
    cond_start: int = 0
    cond_end: int = 0
    body: Block = field(default_factory=Block)


@dataclass
class ForStmt(Stmt):
    init_text: str = ""
    init_start: int = 0
    init_end: int = 0
    cond_text: str = ""
    cond_start: int = 0
    cond_end: int = 0
    update_text: str = ""
    update_start: int = 0
    update_end: int = 0
    body: Block = field(default_factory=Block)


@dataclass
class ForEachStmt(Stmt):
    header_text: str = ""
    header_start: int = 0
    header_end: int = 0
    body: Block = field(default_factory=Block)


@dataclass
class SwitchCase:
    labels_text: str
    start: int
    body: list[Stmt] = field(default_factory=list)
    has_default: bool = False


@dataclass
class SwitchStmt(Stmt):
    selector_text: str = ""
    selector_start: int = 0
    selector_end: int = 0
    cases: list[SwitchCase] = field(default_factory=list)


@dataclass
class ResourceDecl:
    name: str
    line: int
    text: str


@dataclass
class TryStmt(Stmt):
    resources: list[ResourceDecl] = field(default_factory=list)
    body: Block = field(default_factory=Block)
    catches: list["CatchClause"] = field(default_factory=list)
    finally_block: Block | None = None
    keyword_line: int = 0


@dataclass
class CatchClause:
    param_text: str
    line: int
    body: Block = field(default_factory=Block)


@dataclass
class SyncStmt(Stmt):
    header_text: str = ""
    header_start: int = 0
    header_end: int = 0
    body: Block = field(default_factory=Block)


@dataclass
class LabeledStmt(Stmt):
    label: str = ""
    inner: Stmt | None = None


@dataclass
class MethodSnippet:
    """One parsed method with stable original-file line numbering."""

    source: str
    first_line: int
    method_name: str
    body: Block
    declared_resources: dict[str, int]  # try-with-resources header vars -> line
    signature_end_line: int  # line of the body's opening brace
    last_line: int  # line of the closing brace


# ---------------------------------------------------------------------------
# Parser


class _Cursor:
    def __init__(self, toks: list[Token], source: str, eof_line: int):
        self.toks = toks
        self.source = source
        self.i = 0
        self.eof_line = eof_line

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise JavaSyntaxError("unexpected end of input", self.eof_line)
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            line = tok.line if tok else self.eof_line
            got = tok.text if tok else "end of input"
            raise JavaSyntaxError(f"expected {text!r}, got {got!r}", line)
        return self.next()

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def slice_text(self, lo: int, hi: int) -> str:
        """Source text between token indices [lo, hi)."""
        if hi <= lo:
            return ""
        return self.source[self.toks[lo].start : self.toks[hi - 1].end]


_OPEN = {"(": ")", "[": "]", "{": "}"}


def _scan_balanced(cur: _Cursor, opener: str) -> int:
    """Consume from the opener token through its matching closer.

    Returns the index of the closing token.  Raises at the opener's line when
    the region never closes.
    """
    open_tok = cur.expect(opener)
    depth = {"(": 0, "[": 0, "{": 0}
    depth[opener] += 1
    while True:
        tok = cur.peek()
        if tok is None:
            raise JavaSyntaxError(f"unclosed {opener!r}", open_tok.line)
        cur.next()
        if tok.text in _OPEN:
            depth[tok.text] += 1
        elif tok.text in (")", "]", "}"):
            for o, c in _OPEN.items():
                if c == tok.text:
                    depth[o] -= 1
                    if depth[o] < 0:
                        raise JavaSyntaxError(f"unbalanced {tok.text!r}", tok.line)
            if all(v == 0 for v in depth.values()):
                return cur.i - 1
        if tok.text in (")", "]", "}") and any(v < 0 for v in depth.values()):
            raise JavaSyntaxError(f"unbalanced {tok.text!r}", tok.line)


def _check_nested_body(toks: list[Token], saw_arrow: bool):
    """Reject swallowed lambda/anonymous-class bodies that carry control flow."""
    for tok in toks:
        if tok.kind == "ident" and tok.text in _CONTROL_KEYWORDS:
            construct = (
                "lambda body containing control flow"
                if saw_arrow
                else "anonymous class body containing control flow"
            )
            raise UnsupportedConstructError(construct, tok.line)


class _Parser:
    def __init__(self, cur: _Cursor):
        self.cur = cur

    # -- helpers ------------------------------------------------------------

    def _paren_group(self) -> tuple[str, int, int, int, int]:
        """Consume ``( ... )``; return (inner text, start line, end line, lo, hi)."""
        cur = self.cur
        lo = cur.i
        open_tok = cur.peek()
        if open_tok is None or open_tok.text != "(":
            line = open_tok.line if open_tok else cur.eof_line
            raise JavaSyntaxError("expected '('", line)
        close_idx = _scan_balanced(cur, "(")
        inner = cur.slice_text(lo + 1, close_idx)
        return inner, open_tok.line, cur.toks[close_idx].line, lo + 1, close_idx

    def _block_or_stmt(self) -> Block:
        if self.cur.at("{"):
            return self.parse_block()
        stmt = self.parse_statement()
        return Block([stmt] if stmt is not None else [])

    def parse_block(self) -> Block:
        self.cur.expect("{")
        stmts: list[Stmt] = []
        while True:
            tok = self.cur.peek()
            if tok is None:
                raise JavaSyntaxError("unclosed '{'", self.cur.eof_line)
            if tok.text == "}":
                self.cur.next()
                return Block(stmts)
            stmt = self.parse_statement()
            if stmt is not None:
                stmts.append(stmt)

    # -- statements ----------------------------------------------------------

    def parse_statement(self) -> Stmt | None:
        cur = self.cur
        tok = cur.peek()
        if tok is None:
            raise JavaSyntaxError("unexpected end of input", cur.eof_line)
        text = tok.text
        if text == ";":
            cur.next()
            return None
        if text == "{":
            start = tok.line
            blk = self.parse_block()
            end = cur.toks[cur.i - 1].line
            return BlockStmt(start, end, "{...}", blk)
        if text == "if":
            return self._parse_if()
        if text == "while":
            return self._parse_while()
        if text == "do":
            return self._parse_do()
        if text == "for":
            return self._parse_for()
        if text == "switch":
            return self._parse_switch()
        if text == "try":
            return self._parse_try()
        if text == "synchronized" and cur.peek(1) is not None and cur.peek(1).text == "(":
            return self._parse_synchronized()
        if text == "return":
            return self._parse_jump(ReturnStmt)
        if text == "throw":
            return self._parse_jump(ThrowStmt)
        if text in ("break", "continue"):
            return self._parse_break_continue(text)
        nxt = cur.peek(1)
        if (
            tok.kind == "ident"
            and text not in _KEYWORDS
            and nxt is not None
            and nxt.text == ":"
        ):
            cur.next()
            cur.next()
            inner = self.parse_statement()
            return LabeledStmt(tok.line, tok.line, f"{text}:", text, inner)
        return self._parse_simple()

    def _parse_if(self) -> IfStmt:
        kw = self.cur.next()
        cond, cstart, cend, _, _ = self._paren_group()
        then_block = self._block_or_stmt()
        else_block = None
        if self.cur.at("else"):
            self.cur.next()
            else_block = self._block_or_stmt()
        end = self.cur.toks[self.cur.i - 1].line
        return IfStmt(kw.line, end, f"if ({cond})", cond, kw.line, cend, then_block, else_block)

    def _parse_while(self) -> WhileStmt:
        kw = self.cur.next()
        cond, _, cend, _, _ = self._paren_group()
        body = self._block_or_stmt()
        end = self.cur.toks[self.cur.i - 1].line
        return WhileStmt(kw.line, end, f"while ({cond})", cond, kw.line, cend, body)

    def _parse_do(self) -> DoWhileStmt:
        kw = self.cur.next()
        body = self._block_or_stmt()
        wkw = self.cur.expect("while")
        cond, _, cend, _, _ = self._paren_group()
        self.cur.expect(";")
        return DoWhileStmt(kw.line, cend, f"do ... while ({cond})", cond, wkw.line, cend, body)

    def _parse_for(self):
        kw = self.cur.next()
        _, hstart, hend, lo, hi = self._paren_group()
        toks = self.cur.toks
        # a ':' at paren depth 0 (and not '::') marks an enhanced for
        depth = 0
        semis: list[int] = []
        colon: int | None = None
        for j in range(lo, hi):
            t = toks[j].text
            if t in _OPEN:
                depth += 1
            elif t in (")", "]", "}"):
                depth -= 1
            elif depth == 0 and t == ";":
                semis.append(j)
            elif depth == 0 and t == ":" and colon is None and not semis:
                colon = j
        body_of = self._block_or_stmt
        if colon is not None:
            header = self.cur.slice_text(lo, hi)
            body = body_of()
            end = self.cur.toks[self.cur.i - 1].line
            return ForEachStmt(kw.line, end, f"for ({header})", header, kw.line, hend, body)
        if len(semis) != 2:
            raise JavaSyntaxError("malformed for-header", kw.line)
        cur = self.cur

        def part(a: int, b: int) -> tuple[str, int, int]:
            txt = cur.slice_text(a, b)
            if a >= b:
                return "", kw.line, kw.line
            return txt, toks[a].line, toks[b - 1].line

        init_text, istart, iend = part(lo, semis[0])
        cond_text, cstart, cend = part(semis[0] + 1, semis[1])
        upd_text, ustart, uend = part(semis[1] + 1, hi)
        if not cond_text:
            cstart = cend = kw.line
        body = body_of()
        end = self.cur.toks[self.cur.i - 1].line
        return ForStmt(
            kw.line, end, "for (...)",
            init_text, istart, iend,
            cond_text, cstart, cend,
            upd_text, ustart, uend,
            body,
        )

    def _parse_switch(self) -> SwitchStmt:
        kw = self.cur.next()
        selector, _, send, _, _ = self._paren_group()
        self.cur.expect("{")
        cases: list[SwitchCase] = []
        current: SwitchCase | None = None
        while True:
            tok = self.cur.peek()
            if tok is None:
                raise JavaSyntaxError("unclosed switch body", kw.line)
            if tok.text == "}":
                self.cur.next()
                break
            if tok.text in ("case", "default"):
                label_start = tok.line
                is_default = tok.text == "default"
                self.cur.next()
                lo = self.cur.i
                depth = 0
                while True:
                    t = self.cur.peek()
                    if t is None:
                        raise JavaSyntaxError("unterminated case label", label_start)
                    if t.text == "->":
                        raise UnsupportedConstructError("switch arrow case", t.line)
                    if t.text in _OPEN:
                        depth += 1
                    elif t.text in (")", "]", "}"):
                        depth -= 1
                    elif t.text == ":" and depth == 0:
                        self.cur.next()
                        break
                    self.cur.next()
                label_text = "default" if is_default else f"case {self.cur.slice_text(lo, self.cur.i - 1)}"
                if current is not None and not current.body:
                    current.labels_text += f", {label_text}"
                    current.has_default = current.has_default or is_default
                else:
                    current = SwitchCase(label_text, label_start, [], is_default)
                    cases.append(current)
                continue
            if current is None:
                raise JavaSyntaxError("statement before first case label", tok.line)
            stmt = self.parse_statement()
            if stmt is not None:
                current.body.append(stmt)
        end = self.cur.toks[self.cur.i - 1].line
        return SwitchStmt(
            kw.line, end, f"switch ({selector})", selector, kw.line, send, cases
        )

    def _parse_try(self) -> TryStmt:
        kw = self.cur.next()
        resources: list[ResourceDecl] = []
        if self.cur.at("("):
            _, _, _, lo, hi = self._paren_group()
            toks = self.cur.toks
            depth = 0
            seg_start = lo
            segments: list[tuple[int, int]] = []
            for j in range(lo, hi):
                t = toks[j].text
                if t in _OPEN:
                    depth += 1
                elif t in (")", "]", "}"):
                    depth -= 1
                elif t == ";" and depth == 0:
                    segments.append((seg_start, j))
                    seg_start = j + 1
            if seg_start < hi:
                segments.append((seg_start, hi))
            for a, b in segments:
                if a >= b:
                    continue
                text = self.cur.slice_text(a, b)
                name = _resource_name(toks, a, b)
                if name is None:
                    raise JavaSyntaxError("malformed try-with-resources declaration", toks[a].line)
                resources.append(ResourceDecl(name, toks[a].line, text))
        body = self.parse_block()
        catches: list[CatchClause] = []
        finally_block: Block | None = None
        while self.cur.at("catch"):
            ckw = self.cur.next()
            param, _, _, _, _ = self._paren_group()
            cblock = self.parse_block()
            catches.append(CatchClause(param, ckw.line, cblock))
        if self.cur.at("finally"):
            self.cur.next()
            finally_block = self.parse_block()
        end = self.cur.toks[self.cur.i - 1].line
        return TryStmt(kw.line, end, "try", resources, body, catches, finally_block, kw.line)

    def _parse_synchronized(self) -> SyncStmt:
        kw = self.cur.next()
        expr, _, hend, _, _ = self._paren_group()
        body = self.parse_block()
        end = self.cur.toks[self.cur.i - 1].line
        return SyncStmt(
            kw.line, end, f"synchronized ({expr})", expr, kw.line, hend, body
        )

    def _parse_jump(self, cls) -> Stmt:
        kw = self.cur.next()
        lo = self.cur.i - 1
        depth = 0
        while True:
            tok = self.cur.peek()
            if tok is None:
                raise JavaSyntaxError(f"unterminated {kw.text}-statement", kw.line)
            if tok.text in _OPEN:
                depth += 1
            elif tok.text in (")", "]", "}"):
                depth -= 1
            elif tok.text == ";" and depth == 0:
                self.cur.next()
                break
            self.cur.next()
        end_tok = self.cur.toks[self.cur.i - 1]
        return cls(kw.line, end_tok.line, self.cur.slice_text(lo, self.cur.i - 1))

    def _parse_break_continue(self, which: str) -> Stmt:
        kw = self.cur.next()
        label = None
        tok = self.cur.peek()
        if tok is not None and tok.kind == "ident" and tok.text not in _KEYWORDS:
            label = tok.text
            self.cur.next()
        self.cur.expect(";")
        cls = BreakStmt if which == "break" else ContinueStmt
        text = which if label is None else f"{which} {label}"
        return cls(kw.line, kw.line, text, label)

    def _parse_simple(self) -> SimpleStmt:
        cur = self.cur
        first = cur.peek()
        lo = cur.i
        depth = 0
        saw_arrow = False
        while True:
            tok = cur.peek()
            if tok is None:
                raise JavaSyntaxError("unterminated statement", first.line)
            if tok.text == "->":
                saw_arrow = True
                cur.next()
                continue
            if tok.text == "{":
                blo = cur.i
                _scan_balanced(cur, "{")
                _check_nested_body(cur.toks[blo + 1 : cur.i - 1], saw_arrow)
                continue
            if tok.text in ("(", "["):
                depth += 1
            elif tok.text in (")", "]"):
                depth -= 1
                if depth < 0:
                    raise JavaSyntaxError(f"unbalanced {tok.text!r}", tok.line)
            elif tok.text == ";" and depth == 0:
                cur.next()
                break
            elif tok.text == "}" and depth == 0:
                raise JavaSyntaxError("missing ';'", tok.line)
            cur.next()
        end_tok = cur.toks[cur.i - 1]
        return SimpleStmt(first.line, end_tok.line, cur.slice_text(lo, cur.i - 1))


def _resource_name(toks: list[Token], a: int, b: int) -> str | None:
    """Variable bound by one try-with-resources segment."""
    depth = 0
    for j in range(a, b):
        t = toks[j].text
        if t in _OPEN:
            depth += 1
        elif t in (")", "]", "}"):
            depth -= 1
        elif t == "=" and depth == 0:
            return toks[j - 1].text if j > a and toks[j - 1].kind == "ident" else None
    # Java 9 form: a bare (possibly qualified) variable reference
    idents = [t for t in toks[a:b] if t.kind == "ident"]
    return idents[-1].text if idents else None


def _collect_resources(block: Block, out: dict[str, int]):
    for stmt in block.statements:
        for sub in _child_blocks(stmt):
            _collect_resources(sub, out)
        if isinstance(stmt, TryStmt):
            for res in stmt.resources:
                out.setdefault(res.name, res.line)


def _child_blocks(stmt: Stmt) -> list[Block]:
    if isinstance(stmt, BlockStmt):
        return [stmt.body]
    if isinstance(stmt, IfStmt):
        return [stmt.then_block] + ([stmt.else_block] if stmt.else_block else [])
    if isinstance(stmt, (WhileStmt, DoWhileStmt, ForStmt, ForEachStmt, SyncStmt)):
        return [stmt.body]
    if isinstance(stmt, SwitchStmt):
        return [Block(c.body) for c in stmt.cases]
    if isinstance(stmt, TryStmt):
        blocks = [stmt.body] + [c.body for c in stmt.catches]
        if stmt.finally_block:
            blocks.append(stmt.finally_block)
        return blocks
    if isinstance(stmt, LabeledStmt) and stmt.inner is not None:
        return [Block([stmt.inner])]
    return []


def iter_statements(block: Block):
    """Depth-first walk over every statement in the tree."""
    for stmt in block.statements:
        yield stmt
        for sub in _child_blocks(stmt):
            yield from iter_statements(sub)


def parse_method(source: str, first_line: int = 1) -> MethodSnippet:
    """Parse one method declaration (or a lone ``{ ... }`` block).

    Line numbers in the result are original file lines starting at
    ``first_line``.  Raises :class:`JavaSyntaxError` carrying the first
    offending line on malformed input.
    """
    eof_line = first_line + source.count("\n")
    toks = tokenize(source, first_line)
    if not toks:
        raise JavaSyntaxError("empty source", first_line)
    cur = _Cursor(toks, source, eof_line)

    if toks[0].text == "{":
        method_name = "<block>"
        body_open = toks[0]
    else:
        method_name = None
        angle = 0
        open_idx = None
        i = 0
        while i < len(toks):
            tok = toks[i]
            if tok.text == "@":
                i += 1
                if i < len(toks) and toks[i].kind == "ident":
                    i += 1
                    if i < len(toks) and toks[i].text == "(":
                        cur.i = i
                        _scan_balanced(cur, "(")
                        i = cur.i
                continue
            if tok.text == "<":
                angle += 1
            elif tok.text == ">":
                angle = max(0, angle - 1)
            elif tok.text == "(" and angle == 0:
                open_idx = i
                break
            elif tok.kind == "ident" and tok.text not in _KEYWORDS and angle == 0:
                method_name = tok.text
            i += 1
        if open_idx is None or method_name is None:
            raise JavaSyntaxError("no method declaration found", toks[0].line)
        cur.i = open_idx
        _scan_balanced(cur, "(")
        while True:
            tok = cur.peek()
            if tok is None:
                raise JavaSyntaxError("method has no body", eof_line)
            if tok.text == "{":
                body_open = tok
                break
            if tok.text == ";":
                raise JavaSyntaxError("method has no body", tok.line)
            cur.next()

    parser = _Parser(cur)
    body = parser.parse_block()
    close_tok = cur.toks[cur.i - 1]
    trailing = cur.peek()
    if trailing is not None:
        raise JavaSyntaxError("unexpected content after method body", trailing.line)

    declared: dict[str, int] = {}
    _collect_resources(body, declared)
    return MethodSnippet(
        source=source,
        first_line=first_line,
        method_name=method_name,
        body=body,
        declared_resources=declared,
        signature_end_line=body_open.line,
        last_line=close_tok.line,
    )


_NOT_METHOD_NAMES = frozenset(
    {"if", "for", "while", "switch", "catch", "synchronized", "do", "return",
     "new", "this", "super", "throw", "assert", "case"}
)


def scan_file(source: str) -> list[tuple[str, int, str]]:
    """Find method declarations in a compilation unit.

    Returns ``(name, first_line, method_source)`` triples in source order.
    Heuristic token scan: a name followed by a balanced parameter list, an
    optional throws clause, and a brace-delimited body.
    """
    toks = tokenize(source, 1)
    lines = source.splitlines()
    found: list[tuple[str, int, str]] = []
    i = 0
    while i < len(toks):
        tok = toks[i]
        if not (tok.kind == "ident" and tok.text not in _NOT_METHOD_NAMES):
            i += 1
            continue
        if i + 1 >= len(toks) or toks[i + 1].text != "(":
            i += 1
            continue
        prev = toks[i - 1] if i > 0 else None
        if prev is not None and prev.text in (".", "new", "::"):
            i += 1
            continue
        cur = _Cursor(toks, source, tok.line)
        cur.i = i + 1
        try:
            close_idx = _scan_balanced(cur, "(")
        except JavaSyntaxError:
            i += 1
            continue
        j = close_idx + 1
        if j < len(toks) and toks[j].text == "throws":
            j += 1
            while j < len(toks) and (toks[j].kind == "ident" or toks[j].text in (",", ".")):
                j += 1
        if j >= len(toks) or toks[j].text != "{":
            i += 1
            continue
        # walk back over the signature: annotations, modifiers, return type
        k = i - 1
        while k >= 0 and toks[k].text not in (";", "{", "}", ")"):
            k -= 1
        sig_start = k + 1
        if sig_start >= i and prev is not None and prev.text not in (";", "{", "}", None):
            sig_start = i
        cur.i = j
        try:
            body_close = _scan_balanced(cur, "{")
        except JavaSyntaxError:
            i += 1
            continue
        start_tok = toks[sig_start] if sig_start < i else tok
        first_line = start_tok.line
        text = "\n".join(lines[first_line - 1 : toks[body_close].line])
        found.append((tok.text, first_line, text))
        i = body_close + 1
    return found
