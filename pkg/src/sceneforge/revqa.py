"""Yes/no spatial-reasoning questions: generation, oracle, and scoring.

Sixteen question types are generated per scene from fixed English
templates (shipped as versioned data, not code): plain spatial and logical
forms, plus Random variants that swap in an object absent from the scene
and Adversarial variants that swap in a semantically close object from the
substitute table.  Every item stores a propositional AST whose oracle
evaluation is the ground-truth answer by construction.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .assets import AssetCatalog
from .errors import MalformedAst, MissingItems, NoRelations, SchemaViolation
from .prompts import SpatialSpec, with_article
from .relations import ABOVE, RelationKind
from .seeds import derive_seed

QTYPE_ORDER = (
    "simple_spatial",
    "opposite_spatial",
    "and",
    "or",
    "not",
    "double_negative",
    "random_and",
    "random_or",
    "random_spatial",
    "random_combined_and",
    "random_combined_or",
    "adversarial_and",
    "adversarial_or",
    "adversarial_spatial",
    "adversarial_combined_and",
    "adversarial_combined_or",
)


# -- propositional AST -------------------------------------------------------

@dataclass(frozen=True)
class Present:
    name: str


@dataclass(frozen=True)
class Rel:
    subject: str
    kind: RelationKind
    obj: str


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class SceneFacts:
    present: frozenset[str]
    relations: frozenset[tuple[str, RelationKind, str]]


def facts_from_spec(spec: SpatialSpec) -> SceneFacts:
    """Presence and relation facts implied by a spec, closed under
    opposites: (A, left, B) also yields (B, right, A), and symmetric
    relations yield their mirror image."""
    present = set()
    relations = set()
    for t in spec.triples:
        present.add(t.subject)
        present.add(t.obj)
        relations.add((t.subject, t.kind, t.obj))
        back = t.kind if t.kind.symmetric else t.kind.opposite()
        relations.add((t.obj, back, t.subject))
    return SceneFacts(present=frozenset(present), relations=frozenset(relations))


def facts_from_scene(scene) -> SceneFacts:
    return facts_from_spec(scene.spec)


def evaluate(ast, facts: SceneFacts) -> str:
    """Oracle: standard propositional semantics over the scene facts."""
    return "yes" if _eval(ast, facts) else "no"


def _eval(ast, facts: SceneFacts) -> bool:
    if isinstance(ast, Present):
        if not isinstance(ast.name, str) or not ast.name:
            raise MalformedAst(f"bad presence atom: {ast!r}")
        return ast.name in facts.present
    if isinstance(ast, Rel):
        if (
            not isinstance(ast.subject, str)
            or not isinstance(ast.obj, str)
            or not isinstance(ast.kind, RelationKind)
        ):
            raise MalformedAst(f"bad relation atom: {ast!r}")
        return (ast.subject, ast.kind, ast.obj) in facts.relations
    if isinstance(ast, Not):
        return not _eval(ast.arg, facts)
    if isinstance(ast, And):
        return _eval(ast.left, facts) and _eval(ast.right, facts)
    if isinstance(ast, Or):
        return _eval(ast.left, facts) or _eval(ast.right, facts)
    raise MalformedAst(f"unknown AST node: {ast!r}")


# -- templates ---------------------------------------------------------------

@lru_cache(maxsize=1)
def load_templates() -> dict:
    with resources.files("sceneforge.data").joinpath("revqa_templates_v1.json").open(
        "r", encoding="utf-8"
    ) as fh:
        data = json.load(fh)
    types = data.get("types", {})
    missing = [q for q in QTYPE_ORDER if q not in types]
    if missing:
        raise SchemaViolation(
            f"template file lacks types: {', '.join(missing)}", field="types"
        )
    return data


def display_name(qtype: str) -> str:
    return load_templates()["types"][qtype]["display"]


# -- generation --------------------------------------------------------------

@dataclass(frozen=True)
class Perturbation:
    original: str | None = None
    replacement: str | None = None
    mode: str = "none"  # none | random | adversarial


@dataclass
class QAItem:
    id: str
    qtype: str
    question: str
    ast: object
    answer: str
    perturbation: Perturbation = field(default_factory=Perturbation)
    order_flipped: bool = False


def _adversarial_pool(cls: str, catalog: AssetCatalog,
                      present: frozenset[str]) -> list[str]:
    """Semantically close replacements from the substitute table, both
    directions, restricted to names absent from the scene."""
    pool = [noun for noun, target in catalog.substitutes.items() if target == cls]
    if cls in catalog.substitutes:
        pool.append(catalog.substitutes[cls])
    return sorted(n for n in set(pool) if n not in present)


def generate_questions(facts: SceneFacts, catalog: AssetCatalog,
                       seed: int) -> list[QAItem]:
    """One item per question type, in canonical type order.

    The primary triple is the first non-symmetric relation if any (so the
    opposite form is well defined); with only near-family relations, the
    opposite type falls back to probing a vertical relation that the scene
    does not contain, preserving its always-no answer.  Perturbed types
    replace the primary object with an absent class (random draw) or a
    substitute-table neighbor (adversarial).  Combined types conjoin the
    simple spatial question with a perturbed one from the last triple and
    may flip the stated order, which never changes the answer.
    """
    if not facts.relations:
        raise NoRelations("facts contain no relation triples")
    rng = random.Random(derive_seed("revqa", seed))
    templates = load_templates()
    ttab = templates["types"]
    clause = templates["clause_spatial"]

    ordered = sorted(facts.relations, key=lambda t: (t[0], t[1].token(), t[2]))
    primary = next((t for t in ordered if not t[1].symmetric), ordered[0])
    a, rel, b = primary
    last = ordered[-1] if len(ordered) > 1 else primary
    absent = sorted(set(catalog.class_names) - set(facts.present))

    def random_replacement() -> str:
        return rng.choice(absent)

    def adversarial_replacement(cls: str) -> str:
        pool = _adversarial_pool(cls, catalog, facts.present)
        return rng.choice(pool) if pool else rng.choice(absent)

    items: list[QAItem] = []

    def emit(qtype: str, question: str, ast, perturbation=Perturbation(),
             order_flipped: bool = False) -> None:
        items.append(
            QAItem(
                id=qtype,
                qtype=qtype,
                question=question,
                ast=ast,
                answer=evaluate(ast, facts),
                perturbation=perturbation,
                order_flipped=order_flipped,
            )
        )

    # plain types
    emit("simple_spatial",
         ttab["simple_spatial"]["template"].format(a=a, rel=rel.phrase(), b=b),
         Rel(a, rel, b))

    if rel.symmetric:
        probe = ABOVE  # vertical relation absent from an all-symmetric scene
    else:
        probe = rel.opposite()
    emit("opposite_spatial",
         ttab["opposite_spatial"]["template"].format(a=a, rel=probe.phrase(), b=b),
         Rel(a, probe, b))

    emit("and", ttab["and"]["template"].format(a_art=with_article(a),
                                               b_art=with_article(b)),
         And(Present(a), Present(b)))
    emit("or", ttab["or"]["template"].format(a_art=with_article(a),
                                             b_art=with_article(b)),
         Or(Present(a), Present(b)))
    emit("not", ttab["not"]["template"].format(x=a), Not(Present(a)))
    emit("double_negative",
         ttab["double_negative"]["template"].format(a=a, rel=rel.phrase(), b=b),
         Not(Not(Rel(a, rel, b))))

    # perturbed types; one fresh replacement draw per item
    for mode in ("random", "adversarial"):
        draw = random_replacement if mode == "random" else (
            lambda: adversarial_replacement(b)
        )

        r = draw()
        emit(f"{mode}_and",
             ttab[f"{mode}_and"]["template"].format(a_art=with_article(a),
                                                    r_art=with_article(r)),
             And(Present(a), Present(r)),
             Perturbation(original=b, replacement=r, mode=mode))

        r = draw()
        emit(f"{mode}_or",
             ttab[f"{mode}_or"]["template"].format(a_art=with_article(a),
                                                   r_art=with_article(r)),
             Or(Present(a), Present(r)),
             Perturbation(original=b, replacement=r, mode=mode))

        r = draw()
        emit(f"{mode}_spatial",
             ttab[f"{mode}_spatial"]["template"].format(a=a, rel=rel.phrase(), r=r),
             Rel(a, rel, r),
             Perturbation(original=b, replacement=r, mode=mode))

        for joiner in ("and", "or"):
            a2, rel2, b2 = last
            r = (random_replacement if mode == "random"
                 else lambda: adversarial_replacement(b2))()
            q1 = clause.format(a=a, rel=rel.phrase(), b=b)
            q2 = clause.format(a=a2, rel=rel2.phrase(), b=r)
            s1 = Rel(a, rel, b)
            s2 = Rel(a2, rel2, r)
            flipped = rng.random() < 0.5
            if flipped:
                q1, q2 = q2, q1
                s1, s2 = s2, s1
            qtype = f"{mode}_combined_{joiner}"
            node = And(s1, s2) if joiner == "and" else Or(s1, s2)
            emit(qtype, ttab[qtype]["template"].format(q1=q1, q2=q2), node,
                 Perturbation(original=b2, replacement=r, mode=mode), flipped)

    assert [i.qtype for i in items] == list(QTYPE_ORDER)
    return items


# -- scoring -----------------------------------------------------------------

_ANSWER_RE = re.compile(r"[^a-z]*(yes|no|true|false)\b")


def normalize_response(text: str) -> str | None:
    """Leading yes/no (or true/false) token of a free-text response;
    None when no such token leads the text."""
    match = _ANSWER_RE.match(text.strip().lower())
    if not match:
        return None
    token = match.group(1)
    return "yes" if token in ("yes", "true") else "no"


@dataclass
class TypeScore:
    qtype: str
    display: str
    total: int
    correct: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


@dataclass
class RevqaReport:
    rows: list[TypeScore]
    macro_average: float
    unparseable: list[str]

    def to_text(self) -> str:
        width = max(len(r.display) for r in self.rows) + 2
        lines = [f"{'Question Type':<{width}}{'N':>6}  {'Accuracy':>8}"]
        lines.append("-" * (width + 16))
        for row in self.rows:
            lines.append(f"{row.display:<{width}}{row.total:>6}  {row.accuracy:>8.3f}")
        lines.append("-" * (width + 16))
        lines.append(f"{'Average':<{width}}{'':>6}  {self.macro_average:>8.3f}")
        if self.unparseable:
            lines.append(f"unparseable responses (counted wrong): "
                         f"{len(self.unparseable)}")
        return "\n".join(lines) + "\n"

    def to_records(self) -> list[dict]:
        records = [
            {
                "qtype": r.qtype,
                "display": r.display,
                "total": r.total,
                "correct": r.correct,
                "accuracy": r.accuracy,
            }
            for r in self.rows
        ]
        records.append({"qtype": "average", "display": "Average",
                        "accuracy": self.macro_average,
                        "unparseable": len(self.unparseable)})
        return records


def score_responses(items: list, responses: dict[str, str]) -> RevqaReport:
    """Per-type accuracy over response texts keyed by item id.

    Unparseable responses count as wrong and are listed; ids missing from
    the response map are an error.
    """
    missing = [item.id for item in items if item.id not in responses]
    if missing:
        raise MissingItems(missing)

    by_type: dict[str, TypeScore] = {}
    unparseable: list[str] = []
    for item in items:
        score = by_type.get(item.qtype)
        if score is None:
            score = by_type[item.qtype] = TypeScore(
                qtype=item.qtype, display=display_name(item.qtype), total=0, correct=0
            )
        score.total += 1
        got = normalize_response(responses[item.id])
        if got is None:
            unparseable.append(item.id)
        elif got == item.answer:
            score.correct += 1

    rows = [by_type[q] for q in QTYPE_ORDER if q in by_type]
    rows += [by_type[q] for q in sorted(by_type) if q not in QTYPE_ORDER]
    macro = sum(r.accuracy for r in rows) / len(rows) if rows else 0.0
    return RevqaReport(rows=rows, macro_average=macro, unparseable=unparseable)
