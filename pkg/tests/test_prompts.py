import itertools
import random

import pytest

from sceneforge.errors import NoRelationFound, TooManyRelations, UnresolvableNoun
from sceneforge.prompts import (
    Triple,
    load_prompt_lines,
    parse_prompt,
    render_template,
    with_article,
)
from sceneforge.relations import ABOVE, BEHIND, LEFT, NEAR, SURFACE_PHRASES


def test_parse_simple(catalog):
    spec = parse_prompt("a cat to the left of a dog", catalog)
    assert len(spec.triples) == 1
    t = spec.triples[0]
    assert (t.subject, t.kind, t.obj) == ("cat", LEFT, "dog")
    assert spec.raw_text == "a cat to the left of a dog"
    assert spec.substitutions_applied == []


def test_parse_every_phrase(catalog):
    for phrase, kind in SURFACE_PHRASES.items():
        spec = parse_prompt(render_template("cat", phrase, "dog"), catalog)
        assert spec.triples == [Triple("cat", kind, "dog")]


def test_parse_is_case_and_punctuation_tolerant(catalog):
    spec = parse_prompt("The CAT Above the Dog.", catalog)
    assert spec.triples[0].kind == ABOVE
    assert spec.triples[0].subject == "cat"
    assert spec.triples[0].obj == "dog"


def test_parse_longest_phrase_wins(catalog):
    # "on top of" must not lose to any shorter overlapping phrase
    spec = parse_prompt("a cup on top of a chair", catalog)
    assert spec.triples[0].kind == ABOVE


def test_parse_chain(catalog):
    spec = parse_prompt("a cat above a dog behind a bench", catalog)
    assert len(spec.triples) == 2
    assert spec.triples[0].subject == "cat"
    assert spec.triples[0].obj == "dog"
    assert spec.triples[1].subject == "dog"
    assert spec.triples[1].kind == BEHIND
    assert spec.triples[1].obj == "bench"


def test_parse_substitution_recorded(catalog):
    noun = next(iter(catalog.substitutes))
    target = catalog.substitutes[noun]
    spec = parse_prompt(render_template(noun, "near", "dog"), catalog)
    assert spec.triples[0].subject == target
    assert spec.triples[0].kind == NEAR
    assert (noun, target) in spec.substitutions_applied


def test_parse_errors(catalog):
    with pytest.raises(NoRelationFound):
        parse_prompt("a cat and a dog", catalog)
    with pytest.raises(NoRelationFound):
        parse_prompt("to the left of a dog", catalog)  # empty subject
    with pytest.raises(TooManyRelations):
        parse_prompt("a cat above a dog above a bench above a cup", catalog)
    with pytest.raises(UnresolvableNoun):
        parse_prompt("a gryphon above a dog", catalog)


def test_with_article():
    assert with_article("cat") == "a cat"
    assert with_article("apple") == "an apple"
    assert with_article("orange") == "an orange"


def test_load_prompt_lines(tmp_path):
    path = tmp_path / "prompts.txt"
    path.write_text("# comment\n\na cat near a dog\n  a cup above a bowl  \n")
    assert load_prompt_lines(str(path)) == [
        "a cat near a dog",
        "a cup above a bowl",
    ]


@pytest.mark.nightly
def test_parse_round_trip_exhaustive(catalog):
    # every phrase against a broad sample of ordered class pairs
    rng = random.Random(0)
    names = catalog.class_names
    pairs = [
        (a, b)
        for a, b in itertools.product(rng.sample(names, 40), repeat=2)
        if a != b
    ]
    for phrase, kind in SURFACE_PHRASES.items():
        for a, b in pairs:
            spec = parse_prompt(render_template(a, phrase, b), catalog)
            t = spec.triples[0]
            assert (t.subject, t.kind, t.obj) == (a, kind, b)
