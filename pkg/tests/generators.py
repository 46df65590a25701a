"""Seeded random generators shared by the unit and acceptance tests.

Everything here is driven by a caller-supplied random.Random so runs are
reproducible.  Generated repositories only contain change sets the commit
gate accepts: ops are built in order against a working snapshot, schema
before instances in mixed batches, and the two characteristics that can
raise uniqueness errors are never generated for repository content.
"""

from __future__ import annotations

import random
from datetime import date, timedelta

from ontovcs.changes import Category, ChangeOp, EntityDecl, add, apply, remove
from ontovcs.errors import OntovcsError
from ontovcs.model import (
    And,
    Characteristic,
    ClassDataPropertyLink,
    ClassMembership,
    ClassObjectPropertyLink,
    ClassPropertyRestriction,
    DataAssertion,
    DisjointClasses,
    EntityKind,
    Iri,
    ObjectAssertion,
    Ontology,
    Or,
    PropertyCharacteristic,
    PropertyDomain,
    PropertyRange,
    Resource,
    RestrictionKind,
    SubClassOf,
    SubPropertyOf,
    ValueExpr,
)
from ontovcs.versioning import Repository, init_repository

NAMESPACES = ("ex:alpha", "ex:beta", "ex:gamma")
AUTHORS = ("ada", "grace", "edsger", "barbara")
LITERALS = ("red", "dry 12%", 'say "hi"', "back\\slash", "étoile", "0")

_HINTS = {
    EntityKind.CLASS: "C",
    EntityKind.OBJECT_PROPERTY: "op",
    EntityKind.DATA_PROPERTY: "dp",
    EntityKind.INDIVIDUAL: "i",
}

# characteristics that never trip the uniqueness checks
_SAFE_CHARACTERISTICS = (Characteristic.TRANSITIVE, Characteristic.SYMMETRIC)


def fresh_iri(rng: random.Random, used: set[Iri], kind: EntityKind) -> Iri:
    hint = _HINTS[kind]
    if rng.random() < 0.1:
        hint = "Été"  # keep some non-ascii names in circulation
    while True:
        iri = Iri(rng.choice(NAMESPACES), f"{hint}{rng.randrange(10_000)}")
        if iri not in used:
            used.add(iri)
            return iri


def _by_kind(onto: Ontology) -> dict[EntityKind, list[Iri]]:
    out: dict[EntityKind, list[Iri]] = {k: [] for k in EntityKind}
    for iri, kind in onto.entities.items():
        out[kind].append(iri)
    for lst in out.values():
        lst.sort()
    return out


def gen_expr(rng: random.Random, leaves: list[Iri], depth: int = 2) -> ValueExpr:
    if depth == 0 or len(leaves) < 2 or rng.random() < 0.55:
        return Resource(rng.choice(leaves))
    ctor = And if rng.random() < 0.5 else Or
    return ctor(
        gen_expr(rng, leaves, depth - 1),
        gen_expr(rng, leaves, depth - 1),
    )


def _random_axiom(rng, kinds, *, full):
    """One random axiom candidate over the given entities, or None."""
    classes = kinds[EntityKind.CLASS]
    objs = kinds[EntityKind.OBJECT_PROPERTY]
    dats = kinds[EntityKind.DATA_PROPERTY]
    inds = kinds[EntityKind.INDIVIDUAL]
    builders = []
    if len(classes) >= 2:
        builders.append(lambda: SubClassOf(*rng.sample(classes, 2)))
    if len(objs) >= 2:
        builders.append(lambda: SubPropertyOf(*rng.sample(objs, 2)))
    if len(dats) >= 2:
        builders.append(lambda: SubPropertyOf(*rng.sample(dats, 2)))
    if classes and objs and inds:
        builders.append(
            lambda: ClassObjectPropertyLink(
                rng.choice(classes), rng.choice(objs), gen_expr(rng, inds)
            )
        )
    if classes and dats and inds:
        builders.append(
            lambda: ClassDataPropertyLink(
                rng.choice(classes), rng.choice(dats), gen_expr(rng, inds)
            )
        )
    if inds and classes:
        builders.append(lambda: ClassMembership(rng.choice(inds), rng.choice(classes)))
    if inds and objs:
        builders.append(
            lambda: ObjectAssertion(rng.choice(inds), rng.choice(objs), rng.choice(inds))
        )
    if inds and dats:
        builders.append(
            lambda: DataAssertion(
                rng.choice(inds), rng.choice(dats), rng.choice(LITERALS)
            )
        )
    if full:
        props = objs + dats
        if classes and props and inds:
            def _restriction():
                prop = rng.choice(props)
                kind = rng.choice(tuple(RestrictionKind))
                value = (
                    gen_expr(rng, inds)
                    if kind is RestrictionKind.VALUE
                    else rng.randint(0, 5)
                )
                return ClassPropertyRestriction(rng.choice(classes), prop, kind, value)

            builders.append(_restriction)
        if classes and props:
            builders.append(
                lambda: PropertyDomain(rng.choice(props), rng.choice(classes))
            )
            builders.append(
                lambda: PropertyRange(rng.choice(props), rng.choice(classes))
            )
        if props:
            builders.append(
                lambda: PropertyCharacteristic(
                    rng.choice(props), rng.choice(tuple(Characteristic))
                )
            )
        if len(classes) >= 2:
            builders.append(lambda: DisjointClasses(*rng.sample(classes, 2)))
    if not builders:
        return None
    return rng.choice(builders)()


def gen_ontology(
    rng: random.Random,
    *,
    max_entities: int = 14,
    full: bool = False,
    label: str | None = None,
) -> Ontology:
    """Random valid ontology grown through the public mutators.

    full=False keeps the result free of consistency findings so it can seed
    a repository; full=True also exercises restrictions, domains, ranges,
    characteristics and disjointness (fine for serialization tests).
    """
    if label is None:
        label = f"ex:base#B{rng.randrange(1000)}"
    onto = Ontology(label=label)
    used: set[Iri] = set()
    n = rng.randint(2, max_entities)
    pool = (
        EntityKind.CLASS,
        EntityKind.CLASS,
        EntityKind.INDIVIDUAL,
        EntityKind.INDIVIDUAL,
        EntityKind.DATA_PROPERTY,
        EntityKind.OBJECT_PROPERTY,
    )
    for _ in range(n):
        kind = rng.choice(pool)
        onto = onto.declare_entity(kind, fresh_iri(rng, used, kind))
    kinds = _by_kind(onto)
    for _ in range(rng.randint(0, 2 * n)):
        axiom = _random_axiom(rng, kinds, full=full)
        if axiom is None:
            continue
        try:
            onto = onto.assert_axiom(axiom)
        except OntovcsError:
            continue
    return onto


def _schema_candidate(rng, working, used):
    kinds = _by_kind(working)
    roll = rng.random()
    if roll < 0.35:
        kind = rng.choice(
            (EntityKind.CLASS, EntityKind.OBJECT_PROPERTY, EntityKind.DATA_PROPERTY)
        )
        return add(EntityDecl(kind, fresh_iri(rng, used, kind)))
    if roll < 0.80:
        classes, objs, dats = (
            kinds[EntityKind.CLASS],
            kinds[EntityKind.OBJECT_PROPERTY],
            kinds[EntityKind.DATA_PROPERTY],
        )
        inds = kinds[EntityKind.INDIVIDUAL]
        builders = []
        if len(classes) >= 2:
            builders.append(lambda: SubClassOf(*rng.sample(classes, 2)))
            builders.append(lambda: DisjointClasses(*rng.sample(classes, 2)))
        if len(objs) >= 2:
            builders.append(lambda: SubPropertyOf(*rng.sample(objs, 2)))
        if classes and objs and inds:
            builders.append(
                lambda: ClassObjectPropertyLink(
                    rng.choice(classes), rng.choice(objs), gen_expr(rng, inds)
                )
            )
        if classes and dats and inds:
            builders.append(
                lambda: ClassDataPropertyLink(
                    rng.choice(classes), rng.choice(dats), gen_expr(rng, inds)
                )
            )
            builders.append(
                lambda: ClassPropertyRestriction(
                    rng.choice(classes),
                    rng.choice(dats),
                    rng.choice(
                        (RestrictionKind.MIN, RestrictionKind.MAX, RestrictionKind.EXACT)
                    ),
                    rng.randint(0, 4),
                )
                if rng.random() < 0.5
                else ClassPropertyRestriction(
                    rng.choice(classes),
                    rng.choice(dats),
                    RestrictionKind.VALUE,
                    gen_expr(rng, inds),
                )
            )
        if classes and (objs or dats):
            props = objs + dats
            builders.append(
                lambda: PropertyDomain(rng.choice(props), rng.choice(classes))
            )
        if objs or dats:
            props = objs + dats
            builders.append(
                lambda: PropertyCharacteristic(
                    rng.choice(props), rng.choice(_SAFE_CHARACTERISTICS)
                )
            )
        if not builders:
            return None
        return add(rng.choice(builders)())
    schema_axioms = [
        ax
        for ax in working.axioms
        if not isinstance(ax, (ClassMembership, ObjectAssertion, DataAssertion))
    ]
    if roll < 0.92 and schema_axioms:
        return remove(sorted(schema_axioms, key=repr)[rng.randrange(len(schema_axioms))])
    removable = [
        (iri, kind)
        for iri, kind in working.entities.items()
        if kind is not EntityKind.INDIVIDUAL
    ]
    if removable:
        iri, kind = sorted(removable)[rng.randrange(len(removable))]
        return remove(EntityDecl(kind, iri))
    return None


def _instance_candidate(rng, working, used):
    kinds = _by_kind(working)
    inds = kinds[EntityKind.INDIVIDUAL]
    roll = rng.random()
    if roll < 0.35:
        return add(EntityDecl(EntityKind.INDIVIDUAL, fresh_iri(rng, used, EntityKind.INDIVIDUAL)))
    if roll < 0.80:
        classes = kinds[EntityKind.CLASS]
        objs = kinds[EntityKind.OBJECT_PROPERTY]
        dats = kinds[EntityKind.DATA_PROPERTY]
        builders = []
        if inds and classes:
            builders.append(
                lambda: ClassMembership(rng.choice(inds), rng.choice(classes))
            )
        if inds and objs:
            builders.append(
                lambda: ObjectAssertion(
                    rng.choice(inds), rng.choice(objs), rng.choice(inds)
                )
            )
        if inds and dats:
            builders.append(
                lambda: DataAssertion(
                    rng.choice(inds), rng.choice(dats), rng.choice(LITERALS)
                )
            )
        if not builders:
            return None
        return add(rng.choice(builders)())
    instance_axioms = [
        ax
        for ax in working.axioms
        if isinstance(ax, (ClassMembership, ObjectAssertion, DataAssertion))
    ]
    if roll < 0.92 and instance_axioms:
        return remove(
            sorted(instance_axioms, key=repr)[rng.randrange(len(instance_axioms))]
        )
    if inds:
        return remove(EntityDecl(EntityKind.INDIVIDUAL, rng.choice(inds)))
    return None


def _gen_block(rng, working, used, cat, k):
    ops: list[ChangeOp] = []
    pick = _schema_candidate if cat is Category.SCHEMA else _instance_candidate
    attempts = 0
    while len(ops) < k and attempts < 25 * k:
        attempts += 1
        op = pick(rng, working, used)
        if op is None:
            continue
        try:
            working = apply(op, working)
        except OntovcsError:
            continue
        ops.append(op)
    if not ops:
        kind = EntityKind.INDIVIDUAL if cat is Category.INSTANCE else EntityKind.CLASS
        op = add(EntityDecl(kind, fresh_iri(rng, used, kind)))
        working = apply(op, working)
        ops.append(op)
    return ops, working


def gen_ops(
    rng: random.Random,
    onto: Ontology,
    *,
    n: int = 4,
    mode: str = "mixed",
) -> list[ChangeOp]:
    """Ops that apply cleanly in order on top of `onto`.

    mode is "schema", "instance" or "mixed"; mixed output lists every
    schema op before the first instance op so a split commit preserves
    relative order.
    """
    used = set(onto.entities)
    if mode == "schema":
        ops, _ = _gen_block(rng, onto, used, Category.SCHEMA, n)
        return ops
    if mode == "instance":
        ops, _ = _gen_block(rng, onto, used, Category.INSTANCE, n)
        return ops
    n_schema = max(1, rng.randint(1, max(1, n - 1)))
    schema, working = _gen_block(rng, onto, used, Category.SCHEMA, n_schema)
    instance, _ = _gen_block(rng, working, used, Category.INSTANCE, max(1, n - n_schema))
    return schema + instance


def gen_repo(
    rng: random.Random,
    *,
    max_versions: int = 5,
    max_entities: int = 12,
) -> Repository:
    """Repository with a random base and a few committed versions."""
    repo = init_repository(gen_ontology(rng, max_entities=max_entities, full=False))
    when = date(2015, 1, 1) + timedelta(days=rng.randint(0, 60))
    for _ in range(rng.randint(1, max_versions)):
        mode = rng.choice(("schema", "instance", "mixed"))
        ops = gen_ops(rng, repo.head, n=rng.randint(1, 4), mode=mode)
        for op in ops:
            repo.stage(op)
        description = rng.choice(("", "tidy up", "load batch", "refactor"))
        repo.commit(
            date=when,
            author=rng.choice(AUTHORS),
            description=description,
            split=(mode == "mixed"),
        )
        when += timedelta(days=rng.randint(0, 30))
    return repo
