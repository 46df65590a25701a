"""Immutable ontology snapshots.

A snapshot is an entity map (Iri -> EntityKind) plus a set of axioms over
those entities.  Update methods never mutate: each returns a fresh snapshot,
so earlier versions stay valid however the repository evolves.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterator, Mapping, Union

from .errors import (
    AlreadyDeclaredError,
    DanglingReferenceError,
    DuplicateAxiomError,
    HierarchyCycleError,
    NotPresentError,
)


@dataclass(frozen=True, order=True)
class Iri:
    """Entity identifier split at the last '#': namespace and local name."""

    namespace: str
    local: str

    def __post_init__(self):
        if not self.namespace or not self.local:
            raise ValueError("Iri needs a non-empty namespace and local name")

    @classmethod
    def parse(cls, text: str) -> Iri:
        t = text.strip()
        if t.startswith("<") and t.endswith(">"):
            t = t[1:-1]
        ns, sep, local = t.rpartition("#")
        if not sep:
            raise ValueError(f"Iri needs a '#' separator: {text!r}")
        return cls(ns, local)

    def __str__(self) -> str:
        return f"{self.namespace}#{self.local}"


class EntityKind(Enum):
    CLASS = "Class"
    OBJECT_PROPERTY = "ObjectProperty"
    DATA_PROPERTY = "DataProperty"
    INDIVIDUAL = "Individual"


PROPERTY_KINDS = frozenset({EntityKind.OBJECT_PROPERTY, EntityKind.DATA_PROPERTY})
# kinds a ValueExpr leaf may resolve to
EXPR_LEAF_KINDS = frozenset({EntityKind.CLASS, EntityKind.INDIVIDUAL})


# -- value expressions ---------------------------------------------------------

class ValueExpr:
    """Boolean combination of entity references ('and' / 'or')."""

    __slots__ = ()


@dataclass(frozen=True)
class Resource(ValueExpr):
    iri: Iri


@dataclass(frozen=True)
class And(ValueExpr):
    left: ValueExpr
    right: ValueExpr


@dataclass(frozen=True)
class Or(ValueExpr):
    left: ValueExpr
    right: ValueExpr


def expr_leaves(expr: ValueExpr) -> Iterator[Iri]:
    """All entity references in the expression, left to right."""
    if isinstance(expr, Resource):
        yield expr.iri
    elif isinstance(expr, (And, Or)):
        yield from expr_leaves(expr.left)
        yield from expr_leaves(expr.right)
    else:
        raise TypeError(f"not a ValueExpr: {expr!r}")


class RestrictionKind(Enum):
    VALUE = "value"
    MIN = "min"
    MAX = "max"
    EXACT = "exact"


class Characteristic(Enum):
    TRANSITIVE = "transitive"
    SYMMETRIC = "symmetric"
    FUNCTIONAL = "functional"
    INVERSE_FUNCTIONAL = "inverse_functional"


# -- axioms --------------------------------------------------------------------

class Axiom:
    """Marker base for the twelve axiom variants."""

    __slots__ = ()


@dataclass(frozen=True)
class SubClassOf(Axiom):
    child: Iri
    parent: Iri


@dataclass(frozen=True)
class SubPropertyOf(Axiom):
    child: Iri
    parent: Iri


@dataclass(frozen=True)
class ClassObjectPropertyLink(Axiom):
    cls: Iri
    prop: Iri
    value: ValueExpr


@dataclass(frozen=True)
class ClassDataPropertyLink(Axiom):
    cls: Iri
    prop: Iri
    value: ValueExpr


@dataclass(frozen=True)
class ClassPropertyRestriction(Axiom):
    """`value` restrictions carry a ValueExpr; the counting kinds carry an int."""

    cls: Iri
    prop: Iri
    kind: RestrictionKind
    value: Union[ValueExpr, int]

    def __post_init__(self):
        if self.kind is RestrictionKind.VALUE:
            if not isinstance(self.value, ValueExpr):
                raise TypeError("a 'value' restriction needs a ValueExpr")
        else:
            if isinstance(self.value, bool) or not isinstance(self.value, int):
                raise TypeError(f"a '{self.kind.value}' restriction needs an int")
            if self.value < 0:
                raise ValueError("cardinality bound must be >= 0")


@dataclass(frozen=True)
class PropertyDomain(Axiom):
    prop: Iri
    cls: Iri


@dataclass(frozen=True)
class PropertyRange(Axiom):
    prop: Iri
    target: Iri


@dataclass(frozen=True)
class PropertyCharacteristic(Axiom):
    prop: Iri
    characteristic: Characteristic


@dataclass(frozen=True)
class DisjointClasses(Axiom):
    """Unordered pair; normalized so (a, b) == (b, a)."""

    a: Iri
    b: Iri

    def __post_init__(self):
        if (self.b.namespace, self.b.local) < (self.a.namespace, self.a.local):
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)


@dataclass(frozen=True)
class ClassMembership(Axiom):
    individual: Iri
    cls: Iri


@dataclass(frozen=True)
class ObjectAssertion(Axiom):
    subject: Iri
    prop: Iri
    obj: Iri


@dataclass(frozen=True)
class DataAssertion(Axiom):
    subject: Iri
    prop: Iri
    literal: str


INSTANCE_AXIOM_TYPES = (ClassMembership, ObjectAssertion, DataAssertion)

_CLS = frozenset({EntityKind.CLASS})
_OBJ = frozenset({EntityKind.OBJECT_PROPERTY})
_DAT = frozenset({EntityKind.DATA_PROPERTY})
_IND = frozenset({EntityKind.INDIVIDUAL})

# fixed rendering / sorting order of the variants
AXIOM_ORDER = (
    SubClassOf,
    SubPropertyOf,
    ClassObjectPropertyLink,
    ClassDataPropertyLink,
    ClassPropertyRestriction,
    PropertyDomain,
    PropertyRange,
    PropertyCharacteristic,
    DisjointClasses,
    ClassMembership,
    ObjectAssertion,
    DataAssertion,
)
_VARIANT_RANK = {t: i for i, t in enumerate(AXIOM_ORDER)}


def axiom_slots(axiom: Axiom) -> list[tuple[Iri, frozenset[EntityKind]]]:
    """Direct Iri slots with the entity kinds each position accepts."""
    if isinstance(axiom, SubClassOf):
        return [(axiom.child, _CLS), (axiom.parent, _CLS)]
    if isinstance(axiom, SubPropertyOf):
        return [(axiom.child, PROPERTY_KINDS), (axiom.parent, PROPERTY_KINDS)]
    if isinstance(axiom, ClassObjectPropertyLink):
        return [(axiom.cls, _CLS), (axiom.prop, _OBJ)]
    if isinstance(axiom, ClassDataPropertyLink):
        return [(axiom.cls, _CLS), (axiom.prop, _DAT)]
    if isinstance(axiom, ClassPropertyRestriction):
        return [(axiom.cls, _CLS), (axiom.prop, PROPERTY_KINDS)]
    if isinstance(axiom, PropertyDomain):
        return [(axiom.prop, PROPERTY_KINDS), (axiom.cls, _CLS)]
    if isinstance(axiom, PropertyRange):
        return [(axiom.prop, PROPERTY_KINDS), (axiom.target, _CLS)]
    if isinstance(axiom, PropertyCharacteristic):
        return [(axiom.prop, PROPERTY_KINDS)]
    if isinstance(axiom, DisjointClasses):
        return [(axiom.a, _CLS), (axiom.b, _CLS)]
    if isinstance(axiom, ClassMembership):
        return [(axiom.individual, _IND), (axiom.cls, _CLS)]
    if isinstance(axiom, ObjectAssertion):
        return [(axiom.subject, _IND), (axiom.prop, _OBJ), (axiom.obj, _IND)]
    if isinstance(axiom, DataAssertion):
        return [(axiom.subject, _IND), (axiom.prop, _DAT)]
    raise TypeError(f"not an axiom: {axiom!r}")


def axiom_exprs(axiom: Axiom) -> tuple[ValueExpr, ...]:
    if isinstance(axiom, (ClassObjectPropertyLink, ClassDataPropertyLink)):
        return (axiom.value,)
    if isinstance(axiom, ClassPropertyRestriction) and isinstance(axiom.value, ValueExpr):
        return (axiom.value,)
    return ()


def axiom_iris(axiom: Axiom) -> frozenset[Iri]:
    """Every Iri the axiom touches, expression leaves included."""
    out = {iri for iri, _ in axiom_slots(axiom)}
    for expr in axiom_exprs(axiom):
        out.update(expr_leaves(expr))
    return frozenset(out)


def axiom_sort_key(axiom: Axiom):
    """Variant order first, then a stable textual key; no rendering needed."""
    return (_VARIANT_RANK[type(axiom)], repr(axiom))


# -- the snapshot ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Ontology:
    """Entity declarations plus axioms; equality ignores the label."""

    entities: Mapping[Iri, EntityKind] = field(default_factory=dict)
    axioms: frozenset = frozenset()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "entities", MappingProxyType(dict(self.entities)))
        object.__setattr__(self, "axioms", frozenset(self.axioms))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ontology):
            return NotImplemented
        return self.entities == other.entities and self.axioms == other.axioms

    __hash__ = None  # snapshots compare structurally; not hashable

    def __repr__(self) -> str:
        return (
            f"Ontology({len(self.entities)} entities, "
            f"{len(self.axioms)} axioms, label={self.label!r})"
        )

    # -- updates (each returns a new snapshot) --

    def declare_entity(self, kind: EntityKind, iri: Iri) -> Ontology:
        existing = self.entities.get(iri)
        if existing is not None:
            raise AlreadyDeclaredError(iri, existing)
        ents = dict(self.entities)
        ents[iri] = kind
        return Ontology(ents, self.axioms, self.label)

    def assert_axiom(self, axiom: Axiom) -> Ontology:
        if axiom in self.axioms:
            raise DuplicateAxiomError(axiom)
        self._check_slots(axiom)
        if isinstance(axiom, (SubClassOf, SubPropertyOf)):
            self._check_acyclic(axiom)
        return Ontology(self.entities, self.axioms | {axiom}, self.label)

    def retract_axiom(self, axiom: Axiom) -> Ontology:
        if axiom not in self.axioms:
            raise NotPresentError(axiom)
        return Ontology(self.entities, self.axioms - {axiom}, self.label)

    def retract_entity(self, iri: Iri) -> tuple[Ontology, tuple[Axiom, ...]]:
        """Remove the declaration and every axiom touching it.

        Returns the new snapshot and the cascaded axioms (deterministic order)
        so callers can report or record the collateral loss.
        """
        if iri not in self.entities:
            raise NotPresentError(iri)
        cascaded = tuple(sorted(self.axioms_about(iri), key=axiom_sort_key))
        ents = dict(self.entities)
        del ents[iri]
        return Ontology(ents, self.axioms - set(cascaded), self.label), cascaded

    def retract(self, target) -> Ontology:
        """Remove an axiom or, given an Iri, an entity (cascade discarded)."""
        if isinstance(target, Axiom):
            return self.retract_axiom(target)
        if isinstance(target, Iri):
            return self.retract_entity(target)[0]
        raise TypeError(f"cannot retract {target!r}")

    def relabel(self, label: str) -> Ontology:
        return Ontology(self.entities, self.axioms, label)

    # -- queries --

    def entity_exists(self, iri: Iri, kind: EntityKind | None = None) -> bool:
        found = self.entities.get(iri)
        if found is None:
            return False
        return kind is None or found is kind

    def kind_of(self, iri: Iri) -> EntityKind | None:
        return self.entities.get(iri)

    def axioms_about(self, iri: Iri) -> frozenset:
        """Axioms mentioning the Iri in any slot, expression leaves included."""
        return frozenset(a for a in self.axioms if iri in axiom_iris(a))

    def superclasses(self, cls: Iri) -> frozenset[Iri]:
        """Transitive superclasses, the class itself excluded."""
        if self.entities.get(cls) is not EntityKind.CLASS:
            raise DanglingReferenceError(cls, "superclasses() needs a declared class")
        edges = self._up_edges(SubClassOf)
        seen: set[Iri] = set()
        queue = deque(edges.get(cls, ()))
        while queue:
            cur = queue.popleft()
            if cur in seen:
                continue
            seen.add(cur)
            queue.extend(edges.get(cur, ()))
        seen.discard(cls)
        return frozenset(seen)

    def members_of(self, cls: Iri) -> frozenset[Iri]:
        """Directly asserted members only; subclass members are not pulled in."""
        if self.entities.get(cls) is not EntityKind.CLASS:
            raise DanglingReferenceError(cls, "members_of() needs a declared class")
        return frozenset(
            a.individual
            for a in self.axioms
            if isinstance(a, ClassMembership) and a.cls == cls
        )

    # -- internals --

    def _check_slots(self, axiom: Axiom) -> None:
        for iri, allowed in axiom_slots(axiom):
            kind = self.entities.get(iri)
            if kind is None or kind not in allowed:
                names = " or ".join(sorted(k.value for k in allowed))
                raise DanglingReferenceError(iri, f"needs {names}")
        if isinstance(axiom, SubPropertyOf):
            if self.entities[axiom.child] is not self.entities[axiom.parent]:
                raise DanglingReferenceError(
                    axiom.parent, "sub-property link needs properties of one kind"
                )
        for expr in axiom_exprs(axiom):
            for leaf in expr_leaves(expr):
                kind = self.entities.get(leaf)
                if kind is None or kind not in EXPR_LEAF_KINDS:
                    raise DanglingReferenceError(
                        leaf, "expression leaves need a Class or Individual"
                    )

    def _up_edges(self, variant) -> dict[Iri, list[Iri]]:
        edges: dict[Iri, list[Iri]] = {}
        for a in self.axioms:
            if isinstance(a, variant):
                edges.setdefault(a.child, []).append(a.parent)
        return edges

    def _check_acyclic(self, axiom) -> None:
        # adding child -> parent closes a cycle iff child is reachable
        # upward from parent through existing links of the same variant
        if axiom.child == axiom.parent:
            raise HierarchyCycleError((axiom.child, axiom.parent))
        edges = self._up_edges(type(axiom))
        back: dict[Iri, Iri] = {}
        queue = deque([axiom.parent])
        seen = {axiom.parent}
        while queue:
            cur = queue.popleft()
            if cur == axiom.child:
                path = [cur]
                while path[-1] != axiom.parent:
                    path.append(back[path[-1]])
                path.reverse()  # parent .. child upward
                raise HierarchyCycleError([axiom.child] + path)
            for nxt in edges.get(cur, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    back[nxt] = cur
                    queue.append(nxt)
