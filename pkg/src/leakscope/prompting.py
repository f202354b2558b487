"""Prompt construction for intention providers.

The template has three parts: a task description with five sequential
instructions (type inference and leakable-type triage lead in, then the
three intention kinds), an output format section that mandates the
canonical pattern lines, and the numbered code. Rendering is deterministic:
identical input yields byte-identical prompts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .javasrc import MethodSnippet

TEMPLATE_ID = "roi-v1"

_HEADER = (
    "The following Java method may acquire, release, and validate finite system resources.\n"
    "\n"
    "Carry out these instructions in order:\n"
    "1. Infer the types of the objects used in the code.\n"
    "2. Decide which of these types represent leakable resources"
    " (for example streams, readers, writers, sockets, database connections, and locks).\n"
    "3. Identify every statement that acquires a resource and the variable that stores it.\n"
    "4. Identify every statement that releases a previously acquired resource.\n"
    "5. Identify every condition that validates whether an acquired resource is still reachable.\n"
    "\n"
    "Report each finding on its own line, using exactly these formats and nothing else:\n"
    "line <line number>: <API call> acquires <resource variable> resource\n"
    "line <line number>: <API call> releases <resource variable> resource\n"
    "line <line number>: <condition> validates reachability of <resource variable> resource\n"
    "\n"
    "Code:\n"
)


@dataclass(frozen=True)
class PromptRequest:
    """Numbered code plus the identifier of the template that will wrap it."""

    numbered_code: str
    template_id: str = TEMPLATE_ID


def number_snippet(source: str, first_line: int) -> str:
    """Prefix each line with its original file line number."""
    return "\n".join(
        f"{first_line + i}: {line}" for i, line in enumerate(source.splitlines())
    )


def request_for(snippet: MethodSnippet) -> PromptRequest:
    return PromptRequest(number_snippet(snippet.source, snippet.first_line))


def render_prompt(request: PromptRequest) -> str:
    """Instantiate the template around the numbered code."""
    if not request.numbered_code.strip():
        raise ValueError("cannot render a prompt for empty code")
    return _HEADER + request.numbered_code + "\n"
