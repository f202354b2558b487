import random

import pytest

from leakscope.cfg import build_cfg
from leakscope.detector import detect, stage1, stage2
from leakscope.errors import PathExplosionError
from leakscope.intentions import IntentionSet, acquire, release
from leakscope.javasrc import parse_method
from leakscope.paths import (
    ControlFlowPath,
    enumerate_exhaustive,
    enumerate_paths,
    format_path,
    path_intervals,
)

from conftest import (
    MOTIVATING_FIRST_LINE,
    motivating_buggy_source,
    motivating_fixed_source,
    motivating_intents,
)
from randprog import VARS, random_intents, random_method


def _cfg(src: str, first_line: int = 1):
    return build_cfg(parse_method(src, first_line))


DIAMOND = "void m(int x) {\n    start();\n    if (x > 0)\n        a();\n    else\n        b();\n    done();\n}"


def test_motivating_fixed_two_golden_paths(intents):
    cfg = _cfg(motivating_fixed_source(), MOTIVATING_FIRST_LINE)
    dumps = [format_path(cfg, p) for p in enumerate_paths(cfg, intents)]
    assert dumps == ["[160-185, 186, 187-190]", "[160-185, 187-190]"]


def test_motivating_buggy_single_path(intents):
    cfg = _cfg(motivating_buggy_source(), MOTIVATING_FIRST_LINE)
    paths = enumerate_paths(cfg, intents)
    assert len(paths) == 1
    assert format_path(cfg, paths[0]) == "[160-185]"


def test_resource_free_diamond_prunes_to_one_path():
    cfg = _cfg(DIAMOND)
    pruned = enumerate_paths(cfg, IntentionSet())
    assert len(pruned) == 1
    exhaustive = enumerate_exhaustive(cfg)
    assert len(exhaustive) == 2
    # oracle check: every unpruned variant carries an identical intention trace
    for var in ("x", "a", "b"):
        verdicts = {detect(var, ps, IntentionSet(), cfg).leaked for ps in (pruned, exhaustive)}
        assert verdicts == {False}


def test_branch_with_release_is_not_pruned():
    cfg = _cfg(DIAMOND)
    intents = IntentionSet([acquire("s", 2), release("s", 4)])
    assert len(enumerate_paths(cfg, intents)) == 2


def test_branch_with_return_is_not_pruned():
    src = "void m(int x) {\n    if (x > 0)\n        return;\n    b();\n}"
    cfg = _cfg(src)
    assert len(enumerate_paths(cfg, IntentionSet())) == 2


def test_straight_line_exhaustive_single_path():
    cfg = _cfg("void m() {\n    a();\n    b();\n}")
    assert len(enumerate_exhaustive(cfg)) == 1


def test_nested_double_diamond_exhaustive_four_paths():
    src = (
        "void m(int x) {\n"
        "    if (p())\n"
        "        a();\n"
        "    else\n"
        "        b();\n"
        "    if (q())\n"
        "        c();\n"
        "    else\n"
        "        d();\n"
        "}"
    )
    assert len(enumerate_exhaustive(_cfg(src))) == 4


def test_while_emits_zero_and_one_iteration_variants():
    src = "void m() {\n    open();\n    while (more())\n        work();\n    close();\n}"
    cfg = _cfg(src)
    intents = IntentionSet([acquire("c", 2), release("c", 4)])
    paths = enumerate_paths(cfg, intents)
    assert len(paths) == 2
    # one-iteration variant first (loop-body before loop-exit)
    lengths = [len(p.nodes) for p in paths]
    assert lengths[0] > lengths[1]


def test_do_while_emits_only_one_iteration_variant():
    src = "void m() {\n    do {\n        work();\n    } while (more());\n    done();\n}"
    cfg = _cfg(src)
    paths = enumerate_exhaustive(cfg, loop_bound=1)
    assert len(paths) == 1


def test_loop_body_expanded_at_most_once():
    src = "void m() {\n    while (more())\n        work();\n}"
    cfg = _cfg(src)
    for path in enumerate_exhaustive(cfg, loop_bound=1):
        for nid in set(path.nodes):
            assert path.nodes.count(nid) <= 2


def test_explosion_ceiling_raises():
    parts = []
    for i in range(6):
        parts.append(f"    if (c{i}())\n        use{i}(r{i});\n    else\n        alt{i}(r{i});")
    src = "void m() {\n" + "\n".join(parts) + "\n}"
    cfg = _cfg(src)
    intents = IntentionSet(
        [acquire(f"r{i}", 2 + 4 * i) for i in range(6)]
        + [release(f"r{i}", 4 + 4 * i) for i in range(6)]
    )
    with pytest.raises(PathExplosionError) as err:
        enumerate_paths(cfg, intents, max_paths=16)
    assert "16" in str(err.value)
    assert err.value.limit == 16


def test_path_adjacency_and_endpoints(intents):
    cfg = _cfg(motivating_fixed_source(), MOTIVATING_FIRST_LINE)
    edges = {(e.src, e.dst) for e in cfg.edges}
    for path in enumerate_paths(cfg, intents):
        assert path.nodes[0] == cfg.entry_id
        assert path.nodes[-1] == cfg.exit_id
        for a, b in zip(path.nodes, path.nodes[1:]):
            assert (a, b) in edges


def test_enumeration_is_deterministic(intents):
    cfg = _cfg(motivating_fixed_source(), MOTIVATING_FIRST_LINE)
    first = [p.nodes for p in enumerate_paths(cfg, intents)]
    second = [p.nodes for p in enumerate_paths(cfg, intents)]
    assert first == second


def test_path_intervals_split_at_branch_and_join():
    cfg = _cfg(DIAMOND)
    paths = enumerate_exhaustive(cfg)
    assert path_intervals(cfg, paths[0]) == ["1-3", "4", "7-8"]
    assert path_intervals(cfg, paths[1]) == ["1-3", "6", "7-8"]


def test_pruning_soundness_small_sample():
    rng = random.Random(20240817)
    for _ in range(120):
        src = random_method(rng)
        cfg = _cfg(src)
        intents = random_intents(rng, src)
        pruned = enumerate_paths(cfg, intents)
        exhaustive = enumerate_exhaustive(cfg, loop_bound=1)
        for var in VARS:
            got = detect(var, pruned, intents, cfg).leaked
            want = detect(var, exhaustive, intents, cfg).leaked
            assert got == want, f"verdict mismatch for {var} on:\n{src}\n{list(intents)}"


def test_stage2_never_sets_risky():
    rng = random.Random(7)
    for _ in range(60):
        src = random_method(rng)
        cfg = _cfg(src)
        intents = random_intents(rng, src)
        paths = enumerate_paths(cfg, intents)
        for var in VARS:
            work = [ControlFlowPath(p.nodes, p.id) for p in paths]
            stage1(work, var, intents, cfg)
            before = [p.risky for p in work]
            stage2(work, var, intents, cfg)
            after = [p.risky for p in work]
            assert all(b or not a for a, b in zip(after, before))
