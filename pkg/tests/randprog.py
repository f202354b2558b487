"""Random structured Java methods and intention sets for property tests."""

from __future__ import annotations

import random

from leakscope.intentions import Intention, IntentionKind, IntentionSet


def random_method(rng: random.Random, node_budget: int = 9) -> str:
    """A random method using if/else, loops, returns, and plain statements.

    ``node_budget`` approximates the number of CFG nodes the body may
    produce, keeping the graphs small.
    """
    counter = [0]
    budget = [node_budget]

    def stmt_lines(depth: int) -> list[str]:
        if budget[0] <= 0:
            return []
        roll = rng.random()
        counter[0] += 1
        n = counter[0]
        if roll < 0.40 or depth >= 2 or budget[0] < 3:
            budget[0] -= 1
            return [f"touch{n}();"]
        if roll < 0.65:
            budget[0] -= 1
            body = stmt_lines(depth + 1) or ["noop();"]
            out = [f"if (cond{n}())" + " {"] + _indent(body)
            if rng.random() < 0.5 and budget[0] > 0:
                alt = stmt_lines(depth + 1) or ["noop();"]
                out += ["} else {"] + _indent(alt)
            out.append("}")
            return out
        if roll < 0.85:
            budget[0] -= 1
            body = stmt_lines(depth + 1) or ["noop();"]
            kind = rng.choice(["while", "foreach"])
            if kind == "while":
                head = f"while (more{n}())" + " {"
            else:
                head = f"for (String s{n} : items{n})" + " {"
            return [head] + _indent(body) + ["}"]
        budget[0] -= 1
        return ["return;"]

    lines: list[str] = []
    units = rng.randint(1, 4)
    for _ in range(units):
        if budget[0] <= 0:
            break
        lines.extend(stmt_lines(0))
    body = _indent(lines or ["noop();"])
    return "\n".join(["void generated() {"] + body + ["}"])


def _indent(lines: list[str]) -> list[str]:
    return ["    " + line for line in lines]


VARS = ("r0", "r1")


def random_intents(rng: random.Random, source: str, first_line: int = 1) -> IntentionSet:
    last_line = first_line + source.count("\n")
    out = []
    for var in VARS:
        for _ in range(rng.randint(0, 4)):
            kind = rng.choice(list(IntentionKind))
            line = rng.randint(first_line, last_line)
            out.append(Intention(kind, var, line))
    return IntentionSet(out)
