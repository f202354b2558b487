"""Shared fixtures: the motivating buggy/fixed method pair.

The buggy method occupies lines 160-185 of its file and leaks an HTTP
client acquired at line 167.  The fixed method (lines 160-190) guards a
close call behind a null check at line 185.  The canned intention set for
both is {acquire(client,167), release(client,185), validate(client,186)}.
"""

import json

import pytest

from leakscope.intentions import IntentionSet, acquire, release, validate
from leakscope.javasrc import parse_method

MOTIVATING_FIRST_LINE = 160

_COMMON_BODY = [
    "StringBuilder contents = new StringBuilder();",
    "AndroidHttpClient client = null;",
    "HttpResponse response = null;",
    "BufferedReader reader = null;",
    "String line = null;",
    "HttpGet request = new HttpGet(url);",
    'client = AndroidHttpClient.newInstance("droid");',
    "response = client.execute(request);",
    "int status = response.getStatusLine().getStatusCode();",
    "checkStatus(status);",
    "HttpEntity entity = response.getEntity();",
    "InputStream input = entity.getContent();",
    "InputStreamReader source = new InputStreamReader(input);",
    "reader = new BufferedReader(source);",
    "line = reader.readLine();",
    "appendLine(contents, line);",
    "line = reader.readLine();",
    "appendLine(contents, line);",
    "line = reader.readLine();",
    "appendLine(contents, line);",
    "reader.close();",
    "logTransfer(url, status);",
    "recordMetrics(contents);",
]


def _method(extra: list[str]) -> str:
    lines = ["public String requestUrlContents(String url) {"]
    lines += ["    " + s for s in _COMMON_BODY + extra]
    lines.append("}")
    return "\n".join(lines)


def motivating_buggy_source() -> str:
    """Lines 160-185; a single straight-line path; no release of client."""
    return _method(["return contents.toString();"])


def motivating_fixed_source() -> str:
    """Lines 160-190; close guarded by a null check at 185."""
    return _method(
        [
            "String result = contents.toString();",
            "if (client != null)",
            "    client.close();",
            "contents.setLength(0);",
            "logCompletion(url);",
            "return result;",
        ]
    )


def motivating_intents() -> IntentionSet:
    return IntentionSet(
        [acquire("client", 167), release("client", 185), validate("client", 186)]
    )


def wrap_in_file(method_source: str, first_line: int = MOTIVATING_FIRST_LINE) -> str:
    """Embed a method in a compilation unit so it starts at ``first_line``."""
    pad = ["package com.example.net;", "", "class UrlFetcher {"]
    while len(pad) < first_line - 1:
        pad.append("    // padding")
    return "\n".join(pad + method_source.splitlines() + ["}"]) + "\n"


@pytest.fixture
def buggy_snippet():
    return parse_method(motivating_buggy_source(), MOTIVATING_FIRST_LINE)


@pytest.fixture
def fixed_snippet():
    return parse_method(motivating_fixed_source(), MOTIVATING_FIRST_LINE)


@pytest.fixture
def intents():
    return motivating_intents()


@pytest.fixture
def motivating_fixture_file(tmp_path):
    """Fixture-provider table answering both motivating versions by name."""
    answer = "\n".join(
        [
            "line 167: AndroidHttpClient.newInstance(...) acquires client resource",
            "line 185: AndroidHttpClient.close() releases client resource",
            "line 186: if-condition validates reachability of client resource",
        ]
    )
    path = tmp_path / "fixtures.json"
    path.write_text(json.dumps({"requestUrlContents": answer}))
    return path
