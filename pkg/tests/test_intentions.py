import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leakscope.intentions import (
    Intention,
    IntentionKind,
    IntentionSet,
    acquire,
    parse_answer,
    query,
    release,
    render_answer,
    validate,
)


def test_parse_single_acquire_line():
    text = "line 167: AndroidHttpClient.newInstance(...) acquires client resource"
    parsed = parse_answer(text)
    assert parsed == IntentionSet([acquire("client", 167)])
    (intent,) = list(parsed)
    assert intent.call_text == "AndroidHttpClient.newInstance(...)"


def test_parse_empty_answer_is_empty_set():
    assert parse_answer("") == IntentionSet()


def test_parse_ignores_surrounding_prose():
    text = (
        "Sure! Here is the analysis you asked for.\n"
        "line 3: new FileInputStream(p) acquires f resource\n"
        "The method then reads from the stream.\n"
        "line 9: f.close() releases f resource\n"
        "line 8: f != null validates reachability of f resource\n"
        "No other resources are involved.\n"
    )
    assert parse_answer(text) == IntentionSet(
        [acquire("f", 3), release("f", 9), validate("f", 8)]
    )


def test_parse_verbs_are_case_insensitive():
    assert parse_answer("line 4: open() Acquires s resource") == IntentionSet([acquire("s", 4)])
    assert parse_answer("Line 4: open() acquires s resource") == IntentionSet()


def test_parse_collapses_duplicate_lines():
    text = "line 5: a.lock() acquires a resource\nline 5: a.lock() acquires a resource"
    assert len(parse_answer(text)) == 1


def test_parse_strips_this_qualifier():
    parsed = parse_answer("line 7: this.db.close() releases this.db resource")
    assert parsed == IntentionSet([release("db", 7)])


def test_render_release_example():
    assert render_answer(IntentionSet([release("db", 42)])) == "line 42: close() releases db resource"


def test_render_validate_example():
    rendered = render_answer(IntentionSet([validate("client", 186)]))
    assert rendered == "line 186: if-condition validates reachability of client resource"


def test_render_empty_set():
    assert render_answer(IntentionSet()) == ""


def test_roundtrip_motivating_set():
    s = IntentionSet(
        [acquire("client", 167), release("client", 185), validate("client", 186)]
    )
    assert parse_answer(render_answer(s)) == s


def test_query_membership():
    s = IntentionSet([acquire("client", 167)])
    assert query(s, IntentionKind.ACQUIRE, "client", 167)
    assert not query(s, IntentionKind.RELEASE, "client", 167)
    assert not query(IntentionSet(), IntentionKind.VALIDATE, "x", 1)


def test_query_normalizes_this_prefix():
    s = IntentionSet([acquire("this.client", 167)])
    assert query(s, IntentionKind.ACQUIRE, "client", 167)


def test_equality_ignores_call_text():
    assert acquire("x", 3, "a()") == acquire("x", 3, "b()")
    assert hash(acquire("x", 3, "a()")) == hash(acquire("x", 3))


def test_iteration_order_is_sorted():
    s = IntentionSet([release("b", 9), acquire("z", 2), acquire("a", 2), validate("a", 2)])
    assert [(i.lineno, i.kind, i.var) for i in s] == [
        (2, IntentionKind.ACQUIRE, "a"),
        (2, IntentionKind.ACQUIRE, "z"),
        (2, IntentionKind.VALIDATE, "a"),
        (9, IntentionKind.RELEASE, "b"),
    ]


def test_invalid_intentions_rejected():
    with pytest.raises(ValueError):
        Intention(IntentionKind.ACQUIRE, "", 3)
    with pytest.raises(ValueError):
        Intention(IntentionKind.ACQUIRE, "a b", 3)
    with pytest.raises(ValueError):
        Intention(IntentionKind.ACQUIRE, "x", 0)


_vars = st.from_regex(r"[A-Za-z_][A-Za-z0-9_.]{0,12}", fullmatch=True).filter(
    lambda v: not v.startswith("this.")
)
_texts = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")), max_size=40
)
_intentions = st.builds(
    Intention,
    kind=st.sampled_from(list(IntentionKind)),
    var=_vars,
    lineno=st.integers(min_value=1, max_value=9999),
    call_text=st.one_of(st.none(), _texts),
)
_intention_sets = st.lists(_intentions, max_size=12).map(IntentionSet)


@settings(max_examples=300)
@given(_intention_sets)
def test_roundtrip_property(s):
    assert parse_answer(render_answer(s)) == s


@settings(max_examples=100)
@given(_intention_sets)
def test_parse_is_idempotent_under_duplication(s):
    rendered = render_answer(s)
    doubled = rendered + "\n" + rendered
    assert parse_answer(doubled) == s
