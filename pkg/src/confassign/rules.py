"""Keyword-set rewrite rules applied before similarity calculation.

Reviewers tend to pick general nodes high in the tree; authors pick specific
ones. These rules reconcile the two styles: general reviewer picks are
expanded to their direct children, redundant parent/child pairs in paper
sets are reduced to the child, and a reviewer selection can be restricted
to the entries semantically closest to a given paper.

All functions are pure and never mutate their inputs.
"""

from __future__ import annotations

import enum
from typing import Iterable, Mapping

from .errors import EmptyPaperSet
from .taxonomy import Taxonomy


class CompetenceLevel(enum.IntEnum):
    """Self-declared competence for one keyword; High > Medium > Low."""

    Low = 1
    Medium = 2
    High = 3

    def __str__(self) -> str:  # serialized by name, not by rank
        return self.name


def expand_reviewer_selection(
    taxonomy: Taxonomy,
    selection: Mapping[str, CompetenceLevel],
    depth_threshold: int,
) -> dict[str, CompetenceLevel]:
    """Add the direct children of general high-confidence picks.

    An entry (n, level) triggers expansion when all of these hold: level is
    High or Medium, depth(n) < depth_threshold, n has children, and no
    child of n is already selected. Children inherit the parent's level;
    the parent entry is retained. Conditions are evaluated against the
    original selection only, in a single sweep, so one general pick cannot
    cascade into a whole subtree.

    An entry whose parent is selected together with every one of its
    siblings is skipped: that family is already in its expanded form.
    The skip is what makes re-running the sweep on its own output a no-op
    instead of walking one level deeper each time.
    """
    result = dict(selection)
    for keyword, level in selection.items():
        children = taxonomy.children(keyword)
        if level < CompetenceLevel.Medium:
            continue
        if taxonomy.depth(keyword) >= depth_threshold:
            continue
        if not children:
            continue
        if any(child in selection for child in children):
            continue
        parent = taxonomy.parent(keyword)
        if parent in selection and all(
            sibling in selection for sibling in taxonomy.children(parent)
        ):
            continue
        for child in children:
            result[child] = level
    return result


def reduce_parent_child(taxonomy: Taxonomy, keywords: Iterable[str]) -> frozenset[str]:
    """Drop every keyword that is the direct parent of another one in the set.

    The child is the more informative of the two. Repeating removal until
    fixpoint is equivalent to one sweep against the original set: a keyword
    survives iff none of its direct children is present.
    """
    kept = set(keywords)
    taxonomy.validate_keywords(kept)
    return frozenset(
        kw for kw in kept if not any(child in kept for child in taxonomy.children(kw))
    )


def restrict_to_closest(
    taxonomy: Taxonomy,
    paper_keywords: Iterable[str],
    selection: Mapping[str, CompetenceLevel],
) -> dict[str, CompetenceLevel]:
    """Keep only the reviewer keywords closest to some paper keyword.

    For each paper keyword the selection entries maximizing the pairwise
    similarity are retained (all of them on ties); the result is the union
    over the paper's keywords, with competence levels preserved.
    """
    from .similarity import keyword_pair_similarity  # deferred: rules <-> similarity

    paper = list(paper_keywords)
    if not paper:
        raise EmptyPaperSet("paper keyword set is empty")
    taxonomy.validate_keywords(paper)
    taxonomy.validate_keywords(selection)
    kept: dict[str, CompetenceLevel] = {}
    for p in paper:
        scores = {r: keyword_pair_similarity(taxonomy, p, r) for r in selection}
        if not scores:
            continue
        best = max(scores.values())
        for r, score in scores.items():
            if score == best:
                kept[r] = selection[r]
    return kept
