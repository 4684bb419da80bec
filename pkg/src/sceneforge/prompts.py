"""Prompt frontend: spatial-template parsing against the asset catalog.

The grammar is deliberately template-shaped, `NP (REL NP){1,2}`, where REL
is one of the 11 surface phrases and NP is an optionally-articled catalog
noun (or a substitutable out-of-vocabulary noun).  Anything else is an
error; free-form caption understanding is out of scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .assets import AssetCatalog
from .errors import NoRelationFound, TooManyRelations
from .relations import SURFACE_PHRASES, RelationKind

_ARTICLES = ("a", "an", "the")

# Longest phrase first so alternation picks the longest match at each
# position ("to the left of" must win over a bare "left" never matching).
_PHRASE_RE = re.compile(
    r"\b(?:" + "|".join(
        re.escape(p) for p in sorted(SURFACE_PHRASES, key=len, reverse=True)
    ) + r")\b",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class Triple:
    subject: str
    kind: RelationKind
    obj: str


@dataclass
class SpatialSpec:
    triples: list[Triple]
    raw_text: str
    substitutions_applied: list[tuple[str, str]] = field(default_factory=list)


def _clean_noun(segment: str) -> str:
    noun = segment.strip().strip(".,;:!?").strip()
    noun = re.sub(r"\s+", " ", noun).lower()
    for article in _ARTICLES:
        if noun.startswith(article + " "):
            noun = noun[len(article) + 1 :]
            break
    return noun


def parse_prompt(text: str, catalog: AssetCatalog) -> SpatialSpec:
    """Parse `NP REL NP` or the chained `NP REL NP REL NP` form.

    Relation phrases are matched case-insensitively with longest-match
    priority; nouns are article-stripped and resolved through the catalog's
    substitute table, with every substitution recorded on the spec.
    """
    matches = list(_PHRASE_RE.finditer(text))
    if not matches:
        raise NoRelationFound(f"no spatial relation phrase in {text!r}")
    if len(matches) > 2:
        raise TooManyRelations(
            f"{len(matches)} relation phrases in {text!r}; at most 2 supported",
            count=len(matches),
        )

    segments = []
    cursor = 0
    for match in matches:
        segments.append(text[cursor : match.start()])
        cursor = match.end()
    segments.append(text[cursor:])

    substitutions: list[tuple[str, str]] = []
    resolved: list[str] = []
    for segment in segments:
        noun = _clean_noun(segment)
        if not noun:
            raise NoRelationFound(f"missing object noun in {text!r}")
        cls = catalog.resolve(noun)
        if cls != noun:
            substitutions.append((noun, cls))
        resolved.append(cls)

    kinds = [SURFACE_PHRASES[m.group(0).lower()] for m in matches]
    triples = [
        Triple(subject=resolved[i], kind=kinds[i], obj=resolved[i + 1])
        for i in range(len(kinds))
    ]
    return SpatialSpec(triples=triples, raw_text=text,
                       substitutions_applied=substitutions)


def with_article(noun: str) -> str:
    article = "an" if noun[:1] in "aeiou" else "a"
    return f"{article} {noun}"


def render_template(subject: str, phrase: str, obj: str) -> str:
    """The canonical two-object prompt template."""
    return f"{with_article(subject)} {phrase} {with_article(obj)}"


def load_prompt_lines(path: str) -> list[str]:
    """Newline-delimited prompt list; blank lines and # comments skipped."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    return [ln for ln in lines if ln and not ln.startswith("#")]


__all__ = [
    "SpatialSpec",
    "Triple",
    "parse_prompt",
    "render_template",
    "with_article",
    "load_prompt_lines",
]
