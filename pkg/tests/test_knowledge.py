import pytest

from catbn.graph import Dag, Pdag
from catbn.knowledge import Knowledge, KnowledgeError, arc_allowed, format_knowledge, parse_knowledge, validate_output

TEXT = """
# background knowledge
tier 1: a, b
tier 2: c
require a -> c
forbid b -> c   # trailing comment
"""


def test_parse_and_format_roundtrip():
    k = parse_knowledge(TEXT)
    assert k.tiers == {"a": 1, "b": 1, "c": 2}
    assert k.required == {("a", "c")}
    assert k.forbidden == {("b", "c")}
    assert parse_knowledge(format_knowledge(k)) == k
    assert Knowledge().is_empty and format_knowledge(Knowledge()) == ""


@pytest.mark.parametrize(
    "text",
    [
        "tier x: a",
        "tier 1: a\ntier 2: a",
        "require a => b",
        "tier 0: a",
        "require a -> a",
        "require a -> b\nforbid a -> b",
        "tier 2: a\ntier 1: b\nrequire a -> b",
        "require a -> b\nrequire b -> c\nrequire c -> a",
    ],
)
def test_invalid_knowledge(text):
    with pytest.raises(KnowledgeError):
        parse_knowledge(text)


def test_arc_allowed_rules():
    k = parse_knowledge(TEXT)
    assert arc_allowed(k, "a", "c")
    assert not arc_allowed(k, "c", "a")  # later tier to earlier
    assert not arc_allowed(k, "b", "c")  # forbidden
    assert arc_allowed(k, "a", "b") and arc_allowed(k, "b", "a")  # same tier
    assert arc_allowed(k, "c", "z") and arc_allowed(k, "z", "c")  # untiered


def test_bind_and_restrict():
    k = parse_knowledge(TEXT)
    with pytest.raises(KnowledgeError):
        k.bind(["a", "b"])
    bk = k.bind(["c", "b", "a"])
    assert bk.allowed(2, 0) and not bk.allowed(0, 2)
    assert bk.is_required(2, 0) and bk.touches_required(0, 2)
    assert not bk.pair_allowed(0, 1)  # b -> c forbidden, c -> b against the tiers
    assert bk.pair_allowed(1, 2)
    small = k.restrict(["a", "b"])
    assert small.required == frozenset() and small.tiers == {"a": 1, "b": 1}


def test_validate_output():
    k = parse_knowledge(TEXT)
    good = Dag("abc", [("a", "c"), ("a", "b")])
    assert validate_output(k, good) == []
    bad = Dag("abc", [("c", "b")])
    problems = validate_output(k, bad)
    assert any("c -> b" in p for p in problems)
    assert any("required arc a -> c is missing" in p for p in problems)
    undirected = Pdag("abc", [("a", "c")], [("b", "c")])
    assert any("undirected" in p for p in validate_output(k, undirected))
    assert validate_output(k, Pdag("abc", [("a", "c")], [("a", "b")])) == []
