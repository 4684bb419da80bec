import pytest

from sceneforge.errors import NoOppositeDefined
from sceneforge.relations import (
    ABOVE,
    BEHIND,
    BELOW,
    IN_FRONT,
    LEFT,
    NEAR,
    RIGHT,
    SURFACE_PHRASES,
    Axis,
    kind_from_token,
    opposite,
)


def test_opposites_are_involutions():
    for kind in (LEFT, RIGHT, ABOVE, BELOW, IN_FRONT, BEHIND):
        assert not kind.symmetric
        assert kind.opposite().opposite() == kind
        assert kind.opposite().axis == kind.axis
        assert kind.opposite() != kind


def test_opposite_pairs():
    assert LEFT.opposite() == RIGHT
    assert ABOVE.opposite() == BELOW
    assert IN_FRONT.opposite() == BEHIND
    assert opposite(RIGHT) == LEFT


def test_near_is_symmetric_without_opposite():
    assert NEAR.symmetric
    with pytest.raises(NoOppositeDefined):
        NEAR.opposite()


def test_surface_phrases_cover_eleven_forms():
    assert len(SURFACE_PHRASES) == 11
    # spot checks across every axis family
    assert SURFACE_PHRASES["to the left of"] == LEFT
    assert SURFACE_PHRASES["on top of"] == ABOVE
    assert SURFACE_PHRASES["on the bottom of"] == BELOW
    assert SURFACE_PHRASES["next to"] == NEAR
    assert SURFACE_PHRASES["in front of"] == IN_FRONT
    assert SURFACE_PHRASES["behind"] == BEHIND
    near_forms = [p for p, k in SURFACE_PHRASES.items() if k.axis is Axis.NEAR]
    assert sorted(near_forms) == ["near", "next to", "on the side of"]


def test_token_round_trip():
    for kind in set(SURFACE_PHRASES.values()):
        assert kind_from_token(kind.token()) == kind
    with pytest.raises(KeyError):
        kind_from_token("sideways")


def test_phrases_are_printable():
    for kind in (LEFT, RIGHT, ABOVE, BELOW, NEAR, IN_FRONT, BEHIND):
        assert kind.phrase()
        assert kind.token()
