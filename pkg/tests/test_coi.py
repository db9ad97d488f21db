"""Conflict-of-interest detectors and bibliography ingestion."""

from __future__ import annotations

import pytest

from confassign.coi import (
    CoIReason,
    Person,
    detect_historical_coauthorship,
    detect_local_coauthorship,
    detect_same_country,
    detect_same_institution,
    ingest_bibliography,
    names_match,
    normalize_name,
    registrable_domain,
)
from confassign.conference import Config
from confassign.errors import MalformedXml

from conftest import HIGH, make_conference


def one_paper_conference(tax, author: Person, reviewer: Person, **kw):
    return make_conference(
        tax,
        papers=[("P1", [author.id], ["CMS"])],
        reviewers=[(reviewer.id, {"CMS": HIGH})],
        roster_extra=[author, reviewer],
        config=Config(k=1),
        **kw,
    )


class TestSameCountry:
    def test_disabled_rule_is_silent(self, tax):
        conf = one_paper_conference(
            tax,
            Person("a1", "Anna", "a1@x.org", country="BG"),
            Person("r1", "Rado", "r1@y.org", country="BG"),
        )
        assert detect_same_country(conf, enabled=False) == set()

    def test_shared_country_flags(self, tax):
        conf = one_paper_conference(
            tax,
            Person("a1", "Anna", "a1@x.org", country="BG"),
            Person("r1", "Rado", "r1@y.org", country="BG"),
        )
        records = detect_same_country(conf, enabled=True)
        assert len(records) == 1
        record = next(iter(records))
        assert (record.paper_id, record.reviewer_id) == ("P1", "r1")
        assert record.reason is CoIReason.SameCountry
        assert record.evidence

    def test_different_countries_pass(self, tax):
        conf = one_paper_conference(
            tax,
            Person("a1", "Anna", "a1@x.org", country="BG"),
            Person("r1", "Rado", "r1@y.org", country="DE"),
        )
        assert detect_same_country(conf, enabled=True) == set()

    def test_missing_country_is_not_a_conflict(self, tax):
        conf = one_paper_conference(
            tax,
            Person("a1", "Anna", "a1@x.org", country=""),
            Person("r1", "Rado", "r1@y.org", country=""),
        )
        assert detect_same_country(conf, enabled=True) == set()


class TestSameInstitution:
    def test_normalized_affiliation_match(self, tax):
        conf = one_paper_conference(
            tax,
            Person("a1", "Anna", "a1@x.org", affiliation="University of Ruse"),
            Person("r1", "Rado", "r1@y.org", affiliation="Ruse University"),
        )
        records = detect_same_institution(conf)
        assert {r.reason for r in records} == {CoIReason.SameInstitution}

    def test_registrable_domain_match(self, tax):
        conf = one_paper_conference(
            tax,
            Person("a1", "Anna", "a@cs.uni-x.edu"),
            Person("r1", "Rado", "b@ee.uni-x.edu"),
        )
        assert len(detect_same_institution(conf)) == 1

    def test_public_provider_blocklisted(self, tax):
        conf = one_paper_conference(
            tax,
            Person("a1", "Anna", "a@gmail.com"),
            Person("r1", "Rado", "b@gmail.com"),
        )
        assert detect_same_institution(conf) == set()

    def test_unrelated_people_pass(self, tax):
        conf = one_paper_conference(
            tax,
            Person("a1", "Anna", "a@uni-x.edu", affiliation="University of X"),
            Person("r1", "Rado", "b@uni-y.edu", affiliation="Y Institute"),
        )
        assert detect_same_institution(conf) == set()


def test_registrable_domain_heuristics():
    assert registrable_domain("a@cs.uni-x.edu") == "uni-x.edu"
    assert registrable_domain("a@mail.ox.ac.uk") == "ox.ac.uk"
    assert registrable_domain("a@gmail.com") == "gmail.com"


class TestLocalCoauthorship:
    def make(self, tax, papers, reviewer_id):
        return make_conference(
            tax,
            papers=papers,
            reviewers=[(reviewer_id, {"CMS": HIGH})],
            config=Config(k=1),
        )

    def test_distance_one(self, tax):
        # reviewer co-authored S with author a1; a1 also wrote X alone
        conf = self.make(
            tax,
            [("X", ["a1"], ["CMS"]), ("S", ["a1", "rv"], ["DL"])],
            "rv",
        )
        records = detect_local_coauthorship(conf)
        by_paper = {r.paper_id: r for r in records}
        assert by_paper["X"].reason is CoIReason.CoAuthorLocal
        # being an author of S itself is also local
        assert by_paper["S"].reason is CoIReason.CoAuthorLocal

    def test_distance_two(self, tax):
        # rv-b co-author, b-a1 co-author, a1 wrote X
        conf = self.make(
            tax,
            [
                ("X", ["a1"], ["CMS"]),
                ("S1", ["rv", "b"], ["DL"]),
                ("S2", ["b", "a1"], ["PL"]),
            ],
            "rv",
        )
        records = {r.paper_id: r for r in detect_local_coauthorship(conf)}
        assert records["X"].reason is CoIReason.CoAuthorOfCoAuthor
        assert "b" in records["X"].evidence

    def test_stronger_reason_wins(self, tax):
        # distance 1 and 2 both hold for X: only CoAuthorLocal is emitted
        conf = self.make(
            tax,
            [
                ("X", ["a1", "c"], ["CMS"]),
                ("S1", ["rv", "a1"], ["DL"]),
                ("S2", ["rv", "b"], ["PL"]),
                ("S3", ["b", "c"], ["HW"]),
            ],
            "rv",
        )
        reasons = [r.reason for r in detect_local_coauthorship(conf) if r.paper_id == "X"]
        assert reasons == [CoIReason.CoAuthorLocal]

    def test_disconnected_reviewer(self, tax):
        conf = self.make(tax, [("X", ["a1", "a2"], ["CMS"])], "rv")
        assert detect_local_coauthorship(conf) == set()


BIB_FIXTURE = b"""<dblp>
  <article key="journals/a1">
    <author>Hans M\xc3\xbcller</author>
    <author>Ivan Petrov</author>
    <title>On Things</title>
    <year>2009</year>
  </article>
  <inproceedings key="conf/b2">
    <author>J. Smith</author>
    <title>More Things</title>
    <year>2011</year>
  </inproceedings>
  <article key="journals/broken">
    <author>Nobody</author>
    <title>No Year</title>
  </article>
  <article key="journals/a3">
    <author>Ivan Petrov</author>
    <author>Maria Ivanova</author>
    <title>Old Things</title>
    <year>1999</year>
  </article>
</dblp>
"""


class TestIngest:
    def test_empty_dump(self):
        corpus = ingest_bibliography(b"<dblp/>")
        assert len(corpus) == 0
        assert corpus.skipped == 0

    def test_fixture_counts(self):
        corpus = ingest_bibliography(BIB_FIXTURE)
        assert len(corpus) == 3
        assert corpus.skipped == 1
        assert corpus.records["journals/a1"].year == 2009
        assert corpus.records["conf/b2"].authors == ("J. Smith",)

    def test_duplicate_keys_last_wins(self):
        doc = b"""<dblp>
          <article key="k"><author>A B</author><title>T1</title><year>2001</year></article>
          <article key="k"><author>C D</author><title>T2</title><year>2002</year></article>
        </dblp>"""
        corpus = ingest_bibliography(doc)
        assert len(corpus) == 1
        assert corpus.records["k"].title == "T2"
        assert any("duplicate" in w for w in corpus.warnings)

    def test_malformed(self):
        with pytest.raises(MalformedXml):
            ingest_bibliography(b"<dblp><article")
        with pytest.raises(MalformedXml):
            ingest_bibliography(b"<notdblp/>")


class TestHistorical:
    def conference(self, tax):
        return make_conference(
            tax,
            papers=[("P1", ["a1"], ["CMS"])],
            reviewers=[("r1", {"CMS": HIGH})],
            roster_extra=[
                Person("a1", "Hans Müller", "a1@x.org"),
                Person("r1", "Ivan Petrov", "r1@y.org"),
            ],
            config=Config(k=1),
        )

    def test_shared_article_in_window(self, tax):
        corpus = ingest_bibliography(BIB_FIXTURE)
        records = detect_historical_coauthorship(
            corpus, self.conference(tax), year_window=10, current_year=2012
        )
        assert len(records) == 1
        record = next(iter(records))
        assert record.reason is CoIReason.HistoricalCoAuthor
        assert record.evidence == "journals/a1"

    def test_outside_window(self, tax):
        corpus = ingest_bibliography(BIB_FIXTURE)
        records = detect_historical_coauthorship(
            corpus, self.conference(tax), year_window=2, current_year=2012
        )
        assert records == set()

    def test_absent_reviewer(self, tax):
        conf = make_conference(
            tax,
            papers=[("P1", ["a1"], ["CMS"])],
            reviewers=[("r1", {"CMS": HIGH})],
            roster_extra=[
                Person("a1", "Hans Müller", "a1@x.org"),
                Person("r1", "Grace Offline", "r1@y.org"),
            ],
            config=Config(k=1),
        )
        corpus = ingest_bibliography(BIB_FIXTURE)
        assert detect_historical_coauthorship(corpus, conf, 10, 2012) == set()

    def test_monotone_in_corpus(self, tax):
        small = ingest_bibliography(b"<dblp/>")
        big = ingest_bibliography(BIB_FIXTURE)
        conf = self.conference(tax)
        before = detect_historical_coauthorship(small, conf, 10, 2012)
        after = detect_historical_coauthorship(big, conf, 10, 2012)
        assert before <= after


class TestNames:
    def test_comma_form_reordered(self):
        assert normalize_name("Müller, Hans") == "hans muller"

    def test_initial_matches_full(self):
        assert names_match("J. Smith", "John Smith")

    def test_identity(self):
        assert names_match("John Smith", "John Smith")

    def test_different_surnames(self):
        assert not names_match("John Smith", "John Smythe")

    def test_different_full_given_names(self):
        assert not names_match("John Smith", "Jane Smith")

    def test_dblp_suffix_stripped(self):
        assert normalize_name("Hans Müller 0001") == "hans muller"

    def test_middle_tokens_ignored(self):
        assert names_match("Hans F. Müller", "Hans Müller")
