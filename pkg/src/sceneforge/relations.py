"""Spatial relation vocabulary: the 11 surface phrases and their kinds.

A relation kind is (axis, polarity).  Polarity is expressed from the
camera's point of view: ``LEFT`` is horizontal/negative because camera
"left" is the negative end of the horizontal screen axis, ``IN_FRONT``
is depth/positive because closer to the camera is the positive end of
the world depth axis.  Near-family phrases are symmetric and have no
opposite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import NoOppositeDefined


class Axis(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    NEAR = "near"
    DEPTH = "depth"


class Polarity(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class RelationKind:
    axis: Axis
    polarity: Polarity

    @property
    def symmetric(self) -> bool:
        return self.polarity is Polarity.SYMMETRIC

    def opposite(self) -> "RelationKind":
        """Polarity-flipped kind on the same axis; undefined for near-family."""
        if self.symmetric:
            raise NoOppositeDefined(f"symmetric relation {self.token()!r} has no opposite")
        flipped = Polarity.NEGATIVE if self.polarity is Polarity.POSITIVE else Polarity.POSITIVE
        return RelationKind(self.axis, flipped)

    def token(self) -> str:
        return _TOKENS[self]

    def phrase(self) -> str:
        """Canonical connective phrase used in questions and reports."""
        return _CANONICAL_PHRASE[self]


LEFT = RelationKind(Axis.HORIZONTAL, Polarity.NEGATIVE)
RIGHT = RelationKind(Axis.HORIZONTAL, Polarity.POSITIVE)
ABOVE = RelationKind(Axis.VERTICAL, Polarity.POSITIVE)
BELOW = RelationKind(Axis.VERTICAL, Polarity.NEGATIVE)
NEAR = RelationKind(Axis.NEAR, Polarity.SYMMETRIC)
IN_FRONT = RelationKind(Axis.DEPTH, Polarity.POSITIVE)
BEHIND = RelationKind(Axis.DEPTH, Polarity.NEGATIVE)

ALL_KINDS = (LEFT, RIGHT, ABOVE, BELOW, NEAR, IN_FRONT, BEHIND)

# The 11 recognized surface phrases.  "on top of"/"on the bottom of" are
# normalized onto the vertical axis; the three near-family phrases share
# one symmetric kind.
SURFACE_PHRASES: dict[str, RelationKind] = {
    "to the left of": LEFT,
    "to the right of": RIGHT,
    "above": ABOVE,
    "below": BELOW,
    "on top of": ABOVE,
    "on the bottom of": BELOW,
    "near": NEAR,
    "next to": NEAR,
    "on the side of": NEAR,
    "in front of": IN_FRONT,
    "behind": BEHIND,
}

_CANONICAL_PHRASE: dict[RelationKind, str] = {
    LEFT: "to the left of",
    RIGHT: "to the right of",
    ABOVE: "above",
    BELOW: "below",
    NEAR: "next to",
    IN_FRONT: "in front of",
    BEHIND: "behind",
}

# Short stable tokens for serialization and report rows.
_TOKENS: dict[RelationKind, str] = {
    LEFT: "left",
    RIGHT: "right",
    ABOVE: "above",
    BELOW: "below",
    NEAR: "near",
    IN_FRONT: "in_front",
    BEHIND: "behind",
}

_FROM_TOKEN = {token: kind for kind, token in _TOKENS.items()}


def kind_from_token(token: str) -> RelationKind:
    return _FROM_TOKEN[token]


def opposite(kind: RelationKind) -> RelationKind:
    return kind.opposite()
