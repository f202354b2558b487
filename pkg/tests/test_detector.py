import pytest

from leakscope.cfg import build_cfg
from leakscope.detector import (
    BranchPair,
    analyze_method,
    detect,
    propagate,
    stage1,
    stage2,
)
from leakscope.intentions import IntentionSet, acquire, release, validate
from leakscope.javasrc import parse_method
from leakscope.paths import ControlFlowPath, enumerate_paths

from conftest import (
    MOTIVATING_FIRST_LINE,
    motivating_buggy_source,
    motivating_fixed_source,
)


def _pipeline(src: str, intents: IntentionSet, first_line: int = 1):
    snippet = parse_method(src, first_line)
    cfg = build_cfg(snippet)
    return snippet, cfg, enumerate_paths(cfg, intents)


def _path(*nodes: int, risky: bool = False) -> ControlFlowPath:
    return ControlFlowPath(tuple(nodes), 0, risky)


# -- stage 1 -----------------------------------------------------------------


def test_stage1_buggy_path_is_risky(intents):
    _, cfg, paths = _pipeline(motivating_buggy_source(), intents, MOTIVATING_FIRST_LINE)
    stage1(paths, "client", intents, cfg)
    assert [p.risky for p in paths] == [True]


def test_stage1_fixed_release_path_balanced(intents):
    _, cfg, paths = _pipeline(motivating_fixed_source(), intents, MOTIVATING_FIRST_LINE)
    stage1(paths, "client", intents, cfg)
    # first path takes the close branch (line 186) and balances out;
    # the skip path stays risky until stage 2
    assert [p.risky for p in paths] == [False, True]


def test_stage1_release_before_acquire_not_risky():
    src = "void m() {\n    give(x);\n    take(x);\n}"
    intents = IntentionSet([release("x", 2)])
    _, cfg, paths = _pipeline(src, intents)
    stage1(paths, "x", intents, cfg)
    assert paths[0].risky is False


# -- propagate ----------------------------------------------------------------


def test_propagate_clears_completely_risky_b1():
    pair = BranchPair((0,), [_path(0, risky=True)], [_path(0, risky=False)])
    propagate(pair)
    assert [p.risky for p in pair.b1] == [False]
    assert [p.risky for p in pair.b2] == [False]


def test_propagate_clears_completely_risky_b2():
    pair = BranchPair((0,), [_path(0, risky=False)], [_path(0, risky=True)])
    propagate(pair)
    assert [p.risky for p in pair.b2] == [False]


def test_propagate_noop_when_both_risky():
    pair = BranchPair((0,), [_path(0, risky=True)], [_path(0, risky=True)])
    propagate(pair)
    assert all(p.risky for p in pair.b1 + pair.b2)


def test_propagate_noop_when_neither_risky():
    pair = BranchPair((0,), [_path(0, risky=False)], [_path(0, risky=False)])
    propagate(pair)
    assert not any(p.risky for p in pair.b1 + pair.b2)


def test_propagate_noop_on_mixed_group():
    b1 = [_path(0, risky=True), _path(0, risky=False)]
    b2 = [_path(0, risky=False)]
    propagate(BranchPair((0,), b1, b2))
    assert [p.risky for p in b1] == [True, False]


def test_branch_pair_requires_both_groups():
    with pytest.raises(ValueError):
        BranchPair((0,), [], [_path(0)])


# -- stage 2 -------------------------------------------------------------------


def test_stage2_eliminates_fai_path(intents):
    _, cfg, paths = _pipeline(motivating_fixed_source(), intents, MOTIVATING_FIRST_LINE)
    stage1(paths, "client", intents, cfg)
    stage2(paths, "client", intents, cfg)
    assert [p.risky for p in paths] == [False, False]


def test_stage2_without_validate_keeps_risky_path():
    intents = IntentionSet([acquire("client", 167), release("client", 185)])
    _, cfg, paths = _pipeline(motivating_fixed_source(), intents, MOTIVATING_FIRST_LINE)
    stage1(paths, "client", intents, cfg)
    stage2(paths, "client", intents, cfg)
    assert [p.risky for p in paths] == [False, True]


def test_stage2_unchanged_when_both_branches_risky():
    src = (
        "void m() {\n"
        "    Res r = open();\n"
        "    if (r != null)\n"
        "        a();\n"
        "    else\n"
        "        b();\n"
        "    done();\n"
        "}"
    )
    intents = IntentionSet([acquire("r", 2), validate("r", 3)])
    _, cfg, paths = _pipeline(src, intents)
    stage1(paths, "r", intents, cfg)
    assert [p.risky for p in paths] == [True, True]
    stage2(paths, "r", intents, cfg)
    assert [p.risky for p in paths] == [True, True]


def test_stage2_nested_guards_clear_inside_out():
    src = (
        "void m() {\n"
        "    Res r = open();\n"
        "    if (r.isValid()) {\n"
        "        if (r.isOpen()) {\n"
        "            r.close();\n"
        "        }\n"
        "    }\n"
        "    done();\n"
        "}"
    )
    intents = IntentionSet(
        [acquire("r", 2), validate("r", 3), validate("r", 4), release("r", 5)]
    )
    _, cfg, paths = _pipeline(src, intents)
    stage1(paths, "r", intents, cfg)
    assert sorted(p.risky for p in paths) == [False, True, True]
    stage2(paths, "r", intents, cfg)
    assert [p.risky for p in paths] == [False, False, False]


# -- detect / analyze_method ----------------------------------------------------


def test_detect_buggy_reports_leak_with_witness(intents):
    _, cfg, paths = _pipeline(motivating_buggy_source(), intents, MOTIVATING_FIRST_LINE)
    verdict = detect("client", paths, intents, cfg)
    assert verdict.leaked is True
    assert verdict.witness == ["160-185"]
    assert verdict.acquire_sites == (167,)


def test_detect_fixed_is_clean(intents):
    _, cfg, paths = _pipeline(motivating_fixed_source(), intents, MOTIVATING_FIRST_LINE)
    verdict = detect("client", paths, intents, cfg)
    assert verdict.leaked is False
    assert verdict.witness is None


def test_detect_empty_intents_never_leaks(intents):
    _, cfg, paths = _pipeline(motivating_buggy_source(), IntentionSet(), MOTIVATING_FIRST_LINE)
    for res in ("client", "reader", "anything"):
        assert detect(res, paths, IntentionSet(), cfg).leaked is False


def test_detect_does_not_mutate_shared_paths(intents):
    _, cfg, paths = _pipeline(motivating_buggy_source(), intents, MOTIVATING_FIRST_LINE)
    detect("client", paths, intents, cfg)
    assert all(p.risky is False for p in paths)


def test_per_resource_independence():
    src = (
        "void m() {\n"
        "    A a = openA();\n"
        "    B b = openB();\n"
        "    a.close();\n"
        "    done();\n"
        "}"
    )
    only_a = IntentionSet([acquire("a", 2), release("a", 4)])
    both = IntentionSet([acquire("a", 2), release("a", 4), acquire("b", 3)])
    _, cfg, paths = _pipeline(src, both)
    assert detect("a", paths, only_a, cfg).leaked == detect("a", paths, both, cfg).leaked


def test_analyze_method_motivating_pair(buggy_snippet, fixed_snippet, intents):
    assert analyze_method(fixed_snippet, intents) == []
    reports = analyze_method(buggy_snippet, IntentionSet([acquire("client", 167)]))
    assert len(reports) == 1
    report = reports[0]
    assert report.resource == "client"
    assert report.acquire_lines == [167]
    assert report.method_id == "requestUrlContents@160"


def test_try_with_resources_filter_suppresses_report():
    src = "void m() {\n    try (FileInputStream f = open(p)) {\n        use(f);\n    }\n}"
    snippet = parse_method(src)
    reports = analyze_method(snippet, IntentionSet([acquire("f", 2)]))
    assert reports == []


def test_finally_release_balances_return_path():
    src = (
        "void m() {\n"
        "    FileInputStream f = open();\n"
        "    try {\n"
        "        process(f);\n"
        "        return;\n"
        "    } finally {\n"
        "        f.close();\n"
        "    }\n"
        "}"
    )
    snippet = parse_method(src)
    intents = IntentionSet([acquire("f", 2), release("f", 7)])
    assert analyze_method(snippet, intents) == []


def test_acquire_in_loop_release_after_loop():
    src = (
        "void m() {\n"
        "    while (more()) {\n"
        "        Res r = open();\n"
        "        use(r);\n"
        "    }\n"
        "    done();\n"
        "}"
    )
    snippet = parse_method(src)
    intents = IntentionSet([acquire("r", 3)])
    reports = analyze_method(snippet, intents)
    assert [r.resource for r in reports] == ["r"]
