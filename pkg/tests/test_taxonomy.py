"""Taxonomy loading, queries, and structural invariants."""

from __future__ import annotations

import random

import pytest

from confassign.errors import (
    DuplicateId,
    EmptyDocument,
    MalformedXml,
    MultipleRoots,
    UnknownKeyword,
)
from confassign.taxonomy import Taxonomy, load_taxonomy_xml

from conftest import FIXTURE_TAXONOMY_XML, random_tree


def test_single_node_document():
    t = load_taxonomy_xml(b'<taxonomy><node id="CS" label="CS"/></taxonomy>')
    assert t.root == "CS"
    assert len(t) == 1
    assert t.depth("CS") == 0
    assert t.children("CS") == ()


def test_two_top_level_nodes_rejected():
    doc = b'<taxonomy><node id="A" label="a"/><node id="B" label="b"/></taxonomy>'
    with pytest.raises(MultipleRoots):
        load_taxonomy_xml(doc)


def test_fixture_shape(tax):
    assert len(tax) == 7
    assert tax.root == "CS"
    assert tax.max_depth() == 3


@pytest.mark.parametrize(
    "node,expected",
    [("CS", 0), ("SW", 1), ("HW", 1), ("IS", 2), ("PL", 2), ("CMS", 3), ("DL", 3)],
)
def test_depth(tax, node, expected):
    assert tax.depth(node) == expected


def test_depth_unknown_keyword(tax):
    with pytest.raises(UnknownKeyword):
        tax.depth("NOPE")


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ("CS", "CMS", "CS"),
        ("CMS", "DL", "IS"),
        ("CMS", "PL", "SW"),
        ("CMS", "HW", "CS"),
    ],
)
def test_lca_fixture(tax, a, b, expected):
    assert tax.lca(a, b) == expected
    assert tax.lca(b, a) == expected


def test_lca_reflexive(tax):
    for node in tax.ids():
        assert tax.lca(node, node) == node


def test_lca_unknown(tax):
    with pytest.raises(UnknownKeyword):
        tax.lca("CMS", "NOPE")


def test_children_document_order(tax):
    assert tax.children("IS") == ("CMS", "DL")
    assert tax.children("CS") == ("SW", "HW")
    assert tax.children("CMS") == ()


def test_malformed_xml():
    with pytest.raises(MalformedXml):
        load_taxonomy_xml(b"<taxonomy><node id='A'")


def test_wrong_root_tag():
    with pytest.raises(MalformedXml):
        load_taxonomy_xml(b'<tree><node id="A" label="a"/></tree>')


def test_missing_attributes():
    with pytest.raises(MalformedXml):
        load_taxonomy_xml(b'<taxonomy><node id="A"/></taxonomy>')
    with pytest.raises(MalformedXml):
        load_taxonomy_xml(b'<taxonomy><node label="a"/></taxonomy>')


def test_unexpected_element():
    with pytest.raises(MalformedXml):
        load_taxonomy_xml(b'<taxonomy><node id="A" label="a"><leaf/></node></taxonomy>')


def test_duplicate_id():
    doc = b'<taxonomy><node id="A" label="a"><node id="A" label="a2"/></node></taxonomy>'
    with pytest.raises(DuplicateId):
        load_taxonomy_xml(doc)


def test_empty_documents():
    with pytest.raises(EmptyDocument):
        load_taxonomy_xml(b"")
    with pytest.raises(EmptyDocument):
        load_taxonomy_xml(b"   \n")
    with pytest.raises(EmptyDocument):
        load_taxonomy_xml(b"<taxonomy/>")


def test_round_trip_fixture(tax):
    assert load_taxonomy_xml(tax.to_xml()) == tax


def test_round_trip_random_trees():
    rng = random.Random(2024)
    for _ in range(50):
        t = random_tree(rng, rng.randint(1, 40))
        assert load_taxonomy_xml(t.to_xml()) == t


def test_depth_zero_iff_root():
    rng = random.Random(7)
    for _ in range(25):
        t = random_tree(rng, rng.randint(1, 30))
        for node in t.ids():
            assert (t.depth(node) == 0) == (node == t.root)


def test_lca_depth_bound_and_symmetry():
    rng = random.Random(99)
    for _ in range(25):
        t = random_tree(rng, rng.randint(2, 30))
        ids = list(t.ids())
        for _ in range(30):
            a, b = rng.choice(ids), rng.choice(ids)
            ancestor = t.lca(a, b)
            assert t.lca(b, a) == ancestor
            assert t.depth(ancestor) <= min(t.depth(a), t.depth(b))


def test_deep_tree_does_not_recurse():
    parents = {f"n{i}": f"n{i - 1}" for i in range(1, 3000)}
    t = Taxonomy.from_parent_map("n0", parents)
    assert t.depth("n2999") == 2999
    assert load_taxonomy_xml(t.to_xml()) == t


def test_parse_preserves_fixture_document(tax):
    reparsed = load_taxonomy_xml(FIXTURE_TAXONOMY_XML)
    assert reparsed == tax
    assert reparsed.label("CMS") == "Content Management Systems"
