"""Typed change operations over snapshots.

An elementary op adds or removes one entity declaration or one axiom.
Composed ops bundle the common multi-step edits and decompose into
elementary sequences before anything is staged.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

from .errors import (
    AmbiguousParentError,
    ChangeError,
    DanglingReferenceError,
    DecompositionError,
    NotInvertibleError,
    NotPresentError,
    OntovcsError,
)
from .model import (
    Axiom,
    ClassMembership,
    EntityKind,
    INSTANCE_AXIOM_TYPES,
    Iri,
    Ontology,
    SubClassOf,
    axiom_iris,
    axiom_sort_key,
)
from . import model


class Direction(Enum):
    ADD = "Add"
    REMOVE = "Remove"


class Category(Enum):
    SCHEMA = "schema"
    INSTANCE = "instance"


@dataclass(frozen=True)
class EntityDecl:
    """A declaration as an op target: kind plus Iri."""

    kind: EntityKind
    iri: Iri


Target = Union[EntityDecl, Axiom]


@dataclass(frozen=True)
class ChangeOp:
    direction: Direction
    target: Target

    def __post_init__(self):
        if not isinstance(self.target, (EntityDecl, Axiom)):
            raise TypeError(f"op target must be a declaration or axiom: {self.target!r}")


def add(target: Target) -> ChangeOp:
    return ChangeOp(Direction.ADD, target)


def remove(target: Target) -> ChangeOp:
    return ChangeOp(Direction.REMOVE, target)


def category(op: ChangeOp) -> Category:
    """Individual declarations and the three assertion axioms are instance
    changes; everything else touches the schema."""
    t = op.target
    if isinstance(t, EntityDecl):
        return Category.INSTANCE if t.kind is EntityKind.INDIVIDUAL else Category.SCHEMA
    if isinstance(t, INSTANCE_AXIOM_TYPES):
        return Category.INSTANCE
    return Category.SCHEMA


def affected_entities(op: ChangeOp) -> frozenset[Iri]:
    t = op.target
    if isinstance(t, EntityDecl):
        return frozenset({t.iri})
    return axiom_iris(t)


_KIND_NAMES = {
    SubClassOf: "ClassHierarchyLink",
    model.SubPropertyOf: "PropertyHierarchyLink",
    model.ClassObjectPropertyLink: "ClassObjectPropertyLink",
    model.ClassDataPropertyLink: "ClassDataPropertyLink",
    model.ClassPropertyRestriction: "ClassPropertyCardinality",
    model.PropertyDomain: "PropertyAttributeLink",
    model.PropertyRange: "PropertyAttributeLink",
    model.PropertyCharacteristic: "TypeProperty",
    model.DisjointClasses: "DisjointClasses",
    ClassMembership: "MemberClass",
    model.ObjectAssertion: "ObjectPropertyAssertion",
    model.DataAssertion: "DataPropertyAssertion",
}


def kind_name(op: ChangeOp) -> str:
    """Direction-less taxonomy name of the op's target."""
    t = op.target
    if isinstance(t, EntityDecl):
        return t.kind.value
    return _KIND_NAMES[type(t)]


def op_kind(op: ChangeOp) -> str:
    """Full taxonomy name, e.g. AddClass or RemoveObjectPropertyAssertion."""
    return op.direction.value + kind_name(op)


# -- application ---------------------------------------------------------------

def apply(op: ChangeOp, onto: Ontology) -> Ontology:
    return _apply(op, onto)[0]


def _apply(op: ChangeOp, onto: Ontology) -> tuple[Ontology, tuple[Axiom, ...]]:
    t = op.target
    if op.direction is Direction.ADD:
        if isinstance(t, EntityDecl):
            return onto.declare_entity(t.kind, t.iri), ()
        return onto.assert_axiom(t), ()
    if isinstance(t, EntityDecl):
        if onto.entities.get(t.iri) is not t.kind:
            raise NotPresentError(t)
        return onto.retract_entity(t.iri)
    return onto.retract_axiom(t), ()


def apply_all(
    ops: Sequence[ChangeOp], onto: Ontology
) -> tuple[Ontology, tuple[Axiom, ...]]:
    """Left fold; collects axioms cascaded by entity removals along the way.

    Failures are wrapped in ChangeError carrying the op and its position.
    """
    cascaded: list[Axiom] = []
    cur = onto
    for i, op in enumerate(ops):
        try:
            cur, lost = _apply(op, cur)
        except OntovcsError as exc:
            raise ChangeError(op, exc, index=i) from exc
        cascaded.extend(lost)
    return cur, tuple(cascaded)


def invert(op: ChangeOp) -> ChangeOp:
    if op.direction is Direction.REMOVE and isinstance(op.target, EntityDecl):
        raise NotInvertibleError(
            op, "removing a declaration cascades; re-adding it cannot restore the loss"
        )
    flipped = Direction.REMOVE if op.direction is Direction.ADD else Direction.ADD
    return ChangeOp(flipped, op.target)


# -- composed ops ----------------------------------------------------------------

class ComposedOp:
    """Marker base for multi-step edits that expand to elementary ops."""

    __slots__ = ()


@dataclass(frozen=True)
class AddClassWithDescription(ComposedOp):
    """New class, optional parent link, and axioms describing it."""

    cls: Iri
    parent: Iri | None = None
    descriptions: tuple[Axiom, ...] = ()


@dataclass(frozen=True)
class AddIndividualWithAssertions(ComposedOp):
    individual: Iri
    member_of: tuple[Iri, ...] = ()
    assertions: tuple[Axiom, ...] = ()


@dataclass(frozen=True)
class RemoveClassPullUp(ComposedOp):
    """Remove a class, re-homing its subclasses and members onto its parent."""

    cls: Iri


def decompose(composed: ComposedOp, onto: Ontology) -> list[ChangeOp]:
    """Expand against the given snapshot; validation failures raise before
    any op is produced, so nothing is ever half-staged."""
    if isinstance(composed, AddClassWithDescription):
        for ax in composed.descriptions:
            if composed.cls not in axiom_iris(ax):
                raise DecompositionError(
                    f"description {ax!r} does not mention <{composed.cls}>"
                )
        ops = [add(EntityDecl(EntityKind.CLASS, composed.cls))]
        if composed.parent is not None:
            ops.append(add(SubClassOf(composed.cls, composed.parent)))
        ops.extend(add(ax) for ax in composed.descriptions)
        return ops

    if isinstance(composed, AddIndividualWithAssertions):
        for ax in composed.assertions:
            if composed.individual not in axiom_iris(ax):
                raise DecompositionError(
                    f"assertion {ax!r} does not mention <{composed.individual}>"
                )
        ops = [add(EntityDecl(EntityKind.INDIVIDUAL, composed.individual))]
        ops.extend(
            add(ClassMembership(composed.individual, c)) for c in composed.member_of
        )
        ops.extend(add(ax) for ax in composed.assertions)
        return ops

    if isinstance(composed, RemoveClassPullUp):
        cls = composed.cls
        if onto.entities.get(cls) is not EntityKind.CLASS:
            raise DanglingReferenceError(cls, "pull-up removal needs a declared class")
        parents = sorted(
            a.parent for a in onto.axioms if isinstance(a, SubClassOf) and a.child == cls
        )
        if len(parents) != 1:
            raise AmbiguousParentError(cls, parents)
        parent = parents[0]
        subclasses = sorted(
            a.child for a in onto.axioms if isinstance(a, SubClassOf) and a.parent == cls
        )
        members = sorted(onto.members_of(cls))
        ops: list[ChangeOp] = []
        for sub in subclasses:
            repl = SubClassOf(sub, parent)
            if repl not in onto.axioms:
                ops.append(add(repl))
        for ind in members:
            repl = ClassMembership(ind, parent)
            if repl not in onto.axioms:
                ops.append(add(repl))
        for ax in sorted(onto.axioms_about(cls), key=axiom_sort_key):
            ops.append(remove(ax))
        ops.append(remove(EntityDecl(EntityKind.CLASS, cls)))
        return ops

    raise TypeError(f"not a composed op: {composed!r}")


# -- impact analysis ---------------------------------------------------------------

@dataclass(frozen=True)
class ImpactReport:
    """What a change sequence would do to a snapshot, measured by set
    difference between the before and after states."""

    entities_added: dict[EntityKind, int]
    entities_removed: dict[EntityKind, int]
    axioms_added: int
    axioms_removed: int
    cascaded_losses: tuple[Axiom, ...]
    warnings: tuple[str, ...]

    @property
    def empty(self) -> bool:
        return not (
            any(self.entities_added.values())
            or any(self.entities_removed.values())
            or self.axioms_added
            or self.axioms_removed
        )


def impact(ops: Sequence[ChangeOp], onto: Ontology) -> ImpactReport:
    """Dry-run the ops and report net effect; the snapshot is untouched.

    Application failures surface as ChangeError exactly as commit would
    raise them.
    """
    after, cascaded_raw = apply_all(ops, onto)

    added_ents = Counter()
    removed_ents = Counter()
    for iri, kind in after.entities.items():
        if onto.entities.get(iri) is not kind:
            added_ents[kind] += 1
    for iri, kind in onto.entities.items():
        if after.entities.get(iri) is not kind:
            removed_ents[kind] += 1

    axioms_added = len(after.axioms - onto.axioms)
    axioms_removed = len(onto.axioms - after.axioms)

    # only losses that were real data before the change count as cascade
    cascaded = tuple(a for a in cascaded_raw if a in onto.axioms)
    warnings = []
    inst_lost = sum(1 for a in cascaded if isinstance(a, INSTANCE_AXIOM_TYPES))
    if inst_lost:
        warnings.append(
            f"entity removal cascades {inst_lost} instance-level axiom(s); "
            "that data is lost unless re-asserted"
        )
    return ImpactReport(
        entities_added=dict(added_ents),
        entities_removed=dict(removed_ents),
        axioms_added=axioms_added,
        axioms_removed=axioms_removed,
        cascaded_losses=cascaded,
        warnings=tuple(warnings),
    )
