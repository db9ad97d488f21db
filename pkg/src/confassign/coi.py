"""Conflict-of-interest detection.

Four automatic detectors plus explicit declarations feed the similarity
matrix: same country (optional rule), same institution (affiliation text or
email domain), co-authorship inside the current submission pool (distance 1
and 2), and historical co-authorship against an ingested bibliography dump.
Every emitted record carries human-readable evidence so a chair can judge
false positives instead of trusting the engine blindly.
"""

from __future__ import annotations

import enum
import re
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import date
from typing import TYPE_CHECKING, Iterable

from .errors import MalformedXml

if TYPE_CHECKING:  # pragma: no cover
    from .conference import Conference


class CoIReason(str, enum.Enum):
    Explicit = "Explicit"
    SameCountry = "SameCountry"
    SameInstitution = "SameInstitution"
    CoAuthorLocal = "CoAuthorLocal"
    CoAuthorOfCoAuthor = "CoAuthorOfCoAuthor"
    HistoricalCoAuthor = "HistoricalCoAuthor"


@dataclass(frozen=True)
class Person:
    id: str
    name: str
    email: str
    country: str = ""
    affiliation: str = ""


@dataclass(frozen=True)
class CoIRecord:
    paper_id: str
    reviewer_id: str
    reason: CoIReason
    evidence: str


@dataclass(frozen=True)
class BibRecord:
    key: str
    title: str
    year: int
    authors: tuple[str, ...]


@dataclass
class BibCorpus:
    """Parsed bibliography dump with a normalized author index."""

    records: dict[str, BibRecord] = field(default_factory=dict)
    skipped: int = 0
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)


# -- name handling ----------------------------------------------------------

_TRAILING_DBLP_SUFFIX = re.compile(r"\s+\d{4}$")
_NON_NAME_CHARS = re.compile(r"[^\w\s-]")


def normalize_name(name: str) -> str:
    """Canonical lowercase ASCII form of a person name.

    Diacritics are folded, "Last, First" is reordered, punctuation is
    dropped and whitespace collapsed. DBLP disambiguation suffixes such as
    "0001" are stripped.
    """
    s = unicodedata.normalize("NFKD", name)
    s = "".join(ch for ch in s if not unicodedata.combining(ch))
    s = s.lower().strip()
    s = _TRAILING_DBLP_SUFFIX.sub("", s)
    if "," in s:
        last, _, first = s.partition(",")
        s = f"{first.strip()} {last.strip()}"
    s = _NON_NAME_CHARS.sub(" ", s)
    return " ".join(s.split())


def names_match(a: str, b: str) -> bool:
    """True when two names plausibly denote the same person.

    Exact normalized equality, or equal surnames plus compatible given
    names ("J. Smith" matches "John Smith"; full given names must be
    equal). Middle tokens are ignored.
    """
    na, nb = normalize_name(a), normalize_name(b)
    if na == nb:
        return True
    ta, tb = na.split(), nb.split()
    if len(ta) < 2 or len(tb) < 2:
        return False
    if ta[-1] != tb[-1]:
        return False
    ga, gb = ta[0], tb[0]
    if len(ga) == 1 or len(gb) == 1:
        return ga[0] == gb[0]
    return ga == gb


# -- institutional matching ---------------------------------------------------

_AFFILIATION_STOPWORDS = {"university", "institute", "dept", "department", "of", "the"}
PUBLIC_EMAIL_PROVIDERS = {
    "gmail.com",
    "yahoo.com",
    "hotmail.com",
    "outlook.com",
    "mail.com",
    "protonmail.com",
}
# second-level labels that act as public suffixes under two-letter ccTLDs
_COMMON_SECOND_LEVEL = {"ac", "co", "com", "edu", "gov", "net", "org"}


def normalize_affiliation(text: str) -> frozenset[str]:
    s = unicodedata.normalize("NFKD", text)
    s = "".join(ch for ch in s if not unicodedata.combining(ch)).lower()
    s = re.sub(r"[^\w\s]", " ", s)
    return frozenset(tok for tok in s.split() if tok not in _AFFILIATION_STOPWORDS)


def registrable_domain(email: str) -> str:
    """Approximate registrable part of an email's domain (uni-x.edu, ox.ac.uk)."""
    domain = email.rsplit("@", 1)[-1].lower().strip()
    labels = [l for l in domain.split(".") if l]
    if len(labels) >= 3 and len(labels[-1]) == 2 and labels[-2] in _COMMON_SECOND_LEVEL:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:]) if len(labels) >= 2 else domain


# -- detectors ---------------------------------------------------------------

def detect_same_country(conference: "Conference", enabled: bool) -> set[CoIRecord]:
    """Author and reviewer sharing a country code, when the rule is on."""
    if not enabled:
        return set()
    roster = conference.roster_by_id()
    records = set()
    for paper in conference.papers:
        for reviewer in conference.reviewers:
            r_person = roster[reviewer.person_id]
            if not r_person.country:
                continue
            for author_id in paper.author_ids:
                author = roster[author_id]
                if author.country and author.country == r_person.country:
                    records.add(
                        CoIRecord(
                            paper.id,
                            reviewer.person_id,
                            CoIReason.SameCountry,
                            f"author {author_id} shares country {author.country}",
                        )
                    )
                    break
    return records


def detect_same_institution(conference: "Conference") -> set[CoIRecord]:
    """Shared affiliation text or shared (non-public) email domain."""
    roster = conference.roster_by_id()
    records = set()
    for paper in conference.papers:
        for reviewer in conference.reviewers:
            r_person = roster[reviewer.person_id]
            r_tokens = normalize_affiliation(r_person.affiliation)
            r_domain = registrable_domain(r_person.email)
            for author_id in paper.author_ids:
                author = roster[author_id]
                evidence = None
                a_tokens = normalize_affiliation(author.affiliation)
                if a_tokens and a_tokens == r_tokens:
                    evidence = f"author {author_id} affiliation matches: {' '.join(sorted(a_tokens))}"
                elif (
                    r_domain
                    and registrable_domain(author.email) == r_domain
                    and r_domain not in PUBLIC_EMAIL_PROVIDERS
                ):
                    evidence = f"author {author_id} shares email domain {r_domain}"
                if evidence:
                    records.add(
                        CoIRecord(
                            paper.id,
                            reviewer.person_id,
                            CoIReason.SameInstitution,
                            evidence,
                        )
                    )
                    break
    return records


def detect_local_coauthorship(conference: "Conference") -> set[CoIRecord]:
    """Conflicts from the co-authorship graph of the current submissions.

    Distance 1 from any author of the paper (or being an author) is
    CoAuthorLocal; distance 2 is CoAuthorOfCoAuthor. The stronger reason
    wins, so the two sets are disjoint per (paper, reviewer).
    """
    adjacency: dict[str, dict[str, str]] = {}  # person -> neighbor -> witness paper
    for paper in conference.papers:
        for a in paper.author_ids:
            for b in paper.author_ids:
                if a != b:
                    adjacency.setdefault(a, {}).setdefault(b, paper.id)

    records = set()
    for paper in conference.papers:
        authors = set(paper.author_ids)
        for reviewer in conference.reviewers:
            rid = reviewer.person_id
            if rid in authors:
                records.add(
                    CoIRecord(
                        paper.id, rid, CoIReason.CoAuthorLocal,
                        "reviewer is an author of the paper",
                    )
                )
                continue
            direct = [a for a in sorted(authors) if a in adjacency.get(rid, {})]
            if direct:
                witness = adjacency[rid][direct[0]]
                records.add(
                    CoIRecord(
                        paper.id, rid, CoIReason.CoAuthorLocal,
                        f"co-authored submission {witness} with author {direct[0]}",
                    )
                )
                continue
            intermediaries = sorted(
                mid
                for mid in adjacency.get(rid, {})
                if any(a in adjacency.get(mid, {}) for a in authors)
            )
            if intermediaries:
                records.add(
                    CoIRecord(
                        paper.id, rid, CoIReason.CoAuthorOfCoAuthor,
                        f"both co-authored with {intermediaries[0]}",
                    )
                )
    return records


def ingest_bibliography(document: bytes | str) -> BibCorpus:
    """Parse a DBLP-style dump: <dblp> of <article>/<inproceedings> entries.

    Entries missing a key, title, a valid year, or any author are skipped
    and counted; duplicate keys keep the last record seen.
    """
    if isinstance(document, str):
        document = document.encode("utf-8")
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise MalformedXml(f"not well-formed XML: {exc}") from exc
    if root.tag != "dblp":
        raise MalformedXml(f"expected <dblp> root element, got <{root.tag}>")

    corpus = BibCorpus()
    for entry in root:
        if entry.tag not in ("article", "inproceedings"):
            continue
        key = entry.get("key")
        title = entry.findtext("title")
        year_text = entry.findtext("year")
        authors = tuple(a.text.strip() for a in entry.findall("author") if a.text)
        year = None
        if year_text is not None:
            try:
                year = int(year_text.strip())
            except ValueError:
                year = None
        if not key or title is None or year is None or year <= 0 or not authors:
            corpus.skipped += 1
            corpus.warnings.append(f"skipped incomplete entry {key or '<no key>'}")
            continue
        if key in corpus.records:
            corpus.warnings.append(f"duplicate key {key}: last record wins")
        corpus.records[key] = BibRecord(key, title.strip(), year, authors)
    return corpus


def detect_historical_coauthorship(
    corpus: BibCorpus,
    conference: "Conference",
    year_window: int,
    current_year: int | None = None,
) -> set[CoIRecord]:
    """Author and reviewer co-occurring on a bibliography record in the window."""
    if current_year is None:
        current_year = date.today().year
    cutoff = current_year - year_window
    roster = conference.roster_by_id()
    reviewer_ids = [rv.person_id for rv in conference.reviewers]

    # (paper_id, reviewer_id) -> earliest matching bib key, for stable evidence
    found: dict[tuple[str, str], str] = {}
    for key in sorted(corpus.records):
        record = corpus.records[key]
        if record.year < cutoff:
            continue
        matches: dict[str, set[int]] = {}
        for person_id in {a for p in conference.papers for a in p.author_ids} | set(
            reviewer_ids
        ):
            person = roster[person_id]
            entries = {
                i for i, name in enumerate(record.authors) if names_match(person.name, name)
            }
            if entries:
                matches[person_id] = entries
        for paper in conference.papers:
            for rid in reviewer_ids:
                if rid not in matches:
                    continue
                for author_id in paper.author_ids:
                    if author_id not in matches:
                        continue
                    # the two must map to distinct author entries of the record
                    if matches[author_id] == matches[rid] and len(matches[rid]) == 1:
                        continue
                    found.setdefault((paper.id, rid), key)
                    break
    return {
        CoIRecord(paper_id, rid, CoIReason.HistoricalCoAuthor, key)
        for (paper_id, rid), key in found.items()
    }


def explicit_coi_records(conference: "Conference") -> set[CoIRecord]:
    """Wrap the conference's declared conflicts as records."""
    return {
        CoIRecord(paper_id, reviewer_id, CoIReason.Explicit, "declared by reviewer")
        for paper_id, reviewer_id in conference.explicit_cois
    }


def merge_records(record_sets: Iterable[set[CoIRecord]]) -> tuple[CoIRecord, ...]:
    """Union detector outputs, one record per (paper, reviewer, reason)."""
    merged: dict[tuple[str, str, CoIReason], CoIRecord] = {}
    for records in record_sets:
        for record in sorted(records, key=lambda r: (r.paper_id, r.reviewer_id, r.reason, r.evidence)):
            merged.setdefault((record.paper_id, record.reviewer_id, record.reason), record)
    return tuple(
        merged[k] for k in sorted(merged, key=lambda k: (k[0], k[1], k[2].value))
    )
