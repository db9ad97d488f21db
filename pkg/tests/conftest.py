"""Shared fixtures: the seven-node taxonomy and a small conference."""

from __future__ import annotations

import random

import pytest

from confassign.bids import Bid
from confassign.coi import Person
from confassign.conference import Conference, Config, Paper, Reviewer
from confassign.rules import CompetenceLevel
from confassign.taxonomy import Taxonomy, load_taxonomy_xml

# CS -> {SW -> {IS -> {CMS, DL}, PL}, HW}
FIXTURE_TAXONOMY_XML = b"""<?xml version="1.0" encoding="utf-8"?>
<taxonomy>
  <node id="CS" label="Computer Science">
    <node id="SW" label="Software">
      <node id="IS" label="Information Systems">
        <node id="CMS" label="Content Management Systems"/>
        <node id="DL" label="Digital Libraries"/>
      </node>
      <node id="PL" label="Programming Languages"/>
    </node>
    <node id="HW" label="Hardware"/>
  </node>
</taxonomy>
"""


@pytest.fixture(scope="session")
def tax() -> Taxonomy:
    return load_taxonomy_xml(FIXTURE_TAXONOMY_XML)


def random_tree(rng: random.Random, n_nodes: int) -> Taxonomy:
    """Random rooted tree with ids n0..n{k}; each node attaches to a random parent."""
    parents: dict[str, str] = {}
    ids = [f"n{i}" for i in range(n_nodes)]
    for i in range(1, n_nodes):
        parents[ids[i]] = ids[rng.randrange(i)]
    return Taxonomy.from_parent_map(ids[0], parents)


HIGH = CompetenceLevel.High
MEDIUM = CompetenceLevel.Medium
LOW = CompetenceLevel.Low


def make_conference(
    tax: Taxonomy,
    papers: list[tuple[str, list[str], list[str]]],
    reviewers: list[tuple[str, dict[str, CompetenceLevel]]],
    roster_extra: list[Person] = (),
    bids: dict[tuple[str, str], Bid] | None = None,
    explicit_cois: list[tuple[str, str]] = (),
    config: Config | None = None,
) -> Conference:
    """papers: (id, author_ids, keywords); reviewers: (person_id, selection)."""
    roster = list(roster_extra)
    have = {p.id for p in roster}
    # one synthetic domain per person so no detector fires by accident
    for pid, authors, _ in papers:
        for a in authors:
            if a not in have:
                roster.append(Person(a, a.title(), f"{a}@uni-{a}.org"))
                have.add(a)
    for rid, _ in reviewers:
        if rid not in have:
            roster.append(Person(rid, rid.title(), f"{rid}@uni-{rid}.org"))
            have.add(rid)
    conference = Conference(
        taxonomy=tax,
        papers=tuple(
            Paper(pid, pid, tuple(authors), frozenset(kws)) for pid, authors, kws in papers
        ),
        reviewers=tuple(Reviewer(rid, dict(sel)) for rid, sel in reviewers),
        roster=tuple(roster),
        bids=dict(bids or {}),
        explicit_cois=tuple(explicit_cois),
        config=config or Config(),
    )
    conference.validate()
    return conference


@pytest.fixture()
def fixture_conference(tax: Taxonomy) -> Conference:
    """3 papers x 3 reviewers over the fixture tree; expansion threshold 3."""
    return make_conference(
        tax,
        papers=[
            ("P1", ["a1"], ["CMS"]),
            ("P2", ["a2"], ["DL", "PL"]),
            ("P3", ["a3"], ["HW"]),
        ],
        reviewers=[
            ("R1", {"IS": HIGH}),
            ("R2", {"SW": MEDIUM, "HW": HIGH}),
            ("R3", {"CS": LOW}),
        ],
        config=Config(k=2, depth_threshold=3),
    )
