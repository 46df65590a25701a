"""Structural consistency rules.

check_ontology inspects a snapshot against the rule set R1-R7;
check_changes gates a staged op sequence before it may become a version.
Rules are independent: each scans the snapshot on its own, so disabling
one never changes another's findings.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import (
    AlreadyDeclaredError,
    ChangeError,
    DanglingReferenceError,
    DuplicateAxiomError,
    HierarchyCycleError,
    NotPresentError,
)
from .model import (
    Axiom,
    ClassMembership,
    ClassPropertyRestriction,
    Characteristic,
    DataAssertion,
    EntityKind,
    Iri,
    ObjectAssertion,
    Ontology,
    PropertyCharacteristic,
    PropertyDomain,
    PropertyRange,
    Resource,
    RestrictionKind,
    SubClassOf,
    SubPropertyOf,
    ValueExpr,
    And,
    Or,
    axiom_slots,
    axiom_exprs,
    expr_leaves,
)
from .changes import Category, ChangeOp, Direction, EntityDecl, affected_entities, apply_all, category


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


#: rule id -> severity (R4/R5 describe modelling smells, not broken structure)
RULE_SEVERITY = {
    "R1": Severity.ERROR,
    "R2": Severity.ERROR,
    "R3": Severity.ERROR,
    "R4": Severity.WARNING,
    "R5": Severity.WARNING,
    "R6": Severity.ERROR,
    "R7": Severity.ERROR,
}
ALL_RULES = tuple(sorted(RULE_SEVERITY))


@dataclass(frozen=True)
class Violation:
    rule: str
    severity: Severity
    message: str
    involved: frozenset[Iri]

    def __post_init__(self):
        if not self.involved:
            raise ValueError("a violation must involve at least one entity")

    def render(self) -> str:
        return f"[{self.rule} {self.severity.value.capitalize()}] {self.message}"


def _sort_key(v: Violation):
    return (v.rule, sorted(str(i) for i in v.involved), v.message)


def check_ontology(
    onto: Ontology, rules: Iterable[str] | None = None
) -> list[Violation]:
    """Run the structural rules over one snapshot.

    `rules` narrows the run to a subset of rule ids; it exists for tests
    and diagnostics, the default is the full set.
    """
    active = set(ALL_RULES if rules is None else rules)
    found: list[Violation] = []
    if "R1" in active:
        found.extend(_r1_dangling(onto))
    if "R2" in active:
        found.extend(_r2_cycles(onto))
    # R3 orders change sequences; a single snapshot has no op order to check
    if "R4" in active:
        found.extend(_r4_domain_range(onto))
    if "R5" in active:
        found.extend(_r5_restrictions(onto))
    # R6 (duplicate declarations) cannot occur inside one snapshot: the
    # entity map holds one kind per Iri; it fires from check_changes
    if "R7" in active:
        found.extend(_r7_characteristics(onto))
    return sorted(found, key=_sort_key)


# -- individual rules ----------------------------------------------------------

def _r1_dangling(onto: Ontology) -> list[Violation]:
    out = []
    for ax in onto.axioms:
        bad: set[Iri] = set()
        for iri, allowed in axiom_slots(ax):
            kind = onto.entities.get(iri)
            if kind is None or kind not in allowed:
                bad.add(iri)
        if isinstance(ax, SubPropertyOf) and not bad:
            if onto.entities[ax.child] is not onto.entities[ax.parent]:
                bad.update({ax.child, ax.parent})
        for expr in axiom_exprs(ax):
            for leaf in expr_leaves(expr):
                kind = onto.entities.get(leaf)
                if kind not in (EntityKind.CLASS, EntityKind.INDIVIDUAL):
                    bad.add(leaf)
        if bad:
            names = ", ".join(sorted(f"<{i}>" for i in bad))
            out.append(
                Violation(
                    "R1",
                    RULE_SEVERITY["R1"],
                    f"axiom references undeclared or mis-kinded entities: {names}",
                    frozenset(bad),
                )
            )
    return out


def _r2_cycles(onto: Ontology) -> list[Violation]:
    out = []
    for variant, label in ((SubClassOf, "class"), (SubPropertyOf, "property")):
        edges: dict[Iri, set[Iri]] = defaultdict(set)
        indeg: dict[Iri, int] = defaultdict(int)
        nodes: set[Iri] = set()
        for ax in onto.axioms:
            if isinstance(ax, variant):
                if ax.parent not in edges[ax.child]:
                    edges[ax.child].add(ax.parent)
                    indeg[ax.parent] += 1
                nodes.update((ax.child, ax.parent))
        # peel leaves; whatever survives sits on a cycle
        queue = [n for n in nodes if indeg[n] == 0]
        remaining = set(nodes)
        while queue:
            n = queue.pop()
            remaining.discard(n)
            for m in edges.get(n, ()):
                indeg[m] -= 1
                if indeg[m] == 0:
                    queue.append(m)
        if remaining:
            names = ", ".join(sorted(f"<{i}>" for i in remaining))
            out.append(
                Violation(
                    "R2",
                    RULE_SEVERITY["R2"],
                    f"{label} hierarchy contains a cycle through: {names}",
                    frozenset(remaining),
                )
            )
    return out


def _membership_index(onto: Ontology) -> dict[Iri, set[Iri]]:
    """individual -> every class it belongs to, directly or via superclasses."""
    super_cache: dict[Iri, frozenset[Iri]] = {}
    member_in: dict[Iri, set[Iri]] = defaultdict(set)
    for ax in onto.axioms:
        if isinstance(ax, ClassMembership):
            member_in[ax.individual].add(ax.cls)
            if onto.entities.get(ax.cls) is EntityKind.CLASS:
                if ax.cls not in super_cache:
                    super_cache[ax.cls] = onto.superclasses(ax.cls)
                member_in[ax.individual].update(super_cache[ax.cls])
    return member_in


def _r4_domain_range(onto: Ontology) -> list[Violation]:
    out = []
    domains: dict[Iri, set[Iri]] = defaultdict(set)
    ranges: dict[Iri, set[Iri]] = defaultdict(set)
    for ax in onto.axioms:
        if isinstance(ax, PropertyDomain):
            domains[ax.prop].add(ax.cls)
        elif isinstance(ax, PropertyRange):
            ranges[ax.prop].add(ax.target)
    if not domains and not ranges:
        return out
    member_in = _membership_index(onto)

    def outside(ind: Iri, cls: Iri) -> bool:
        return cls not in member_in.get(ind, ())

    for ax in onto.axioms:
        if isinstance(ax, ObjectAssertion):
            for cls in sorted(domains.get(ax.prop, ())):
                if outside(ax.subject, cls):
                    out.append(_r4_violation(ax.subject, ax.prop, cls, "domain"))
            for cls in sorted(ranges.get(ax.prop, ())):
                if outside(ax.obj, cls):
                    out.append(_r4_violation(ax.obj, ax.prop, cls, "range"))
        elif isinstance(ax, DataAssertion):
            for cls in sorted(domains.get(ax.prop, ())):
                if outside(ax.subject, cls):
                    out.append(_r4_violation(ax.subject, ax.prop, cls, "domain"))
    return out


def _r4_violation(ind: Iri, prop: Iri, cls: Iri, side: str) -> Violation:
    return Violation(
        "R4",
        RULE_SEVERITY["R4"],
        f"<{ind}> used with <{prop}> is not a member of its {side} <{cls}>",
        frozenset({ind, prop, cls}),
    )


def _expr_satisfied(expr: ValueExpr, obj_values: set[Iri], literals: set[str]) -> bool:
    """Closed-world reading: a leaf holds when the individual carries it as
    an object value, or as a data literal matching the leaf's local name."""
    if isinstance(expr, Resource):
        return expr.iri in obj_values or expr.iri.local in literals
    if isinstance(expr, And):
        return _expr_satisfied(expr.left, obj_values, literals) and _expr_satisfied(
            expr.right, obj_values, literals
        )
    if isinstance(expr, Or):
        return _expr_satisfied(expr.left, obj_values, literals) or _expr_satisfied(
            expr.right, obj_values, literals
        )
    raise TypeError(f"not a ValueExpr: {expr!r}")


def _r5_restrictions(onto: Ontology) -> list[Violation]:
    out = []
    restrictions = [a for a in onto.axioms if isinstance(a, ClassPropertyRestriction)]
    if not restrictions:
        return out
    member_in = _membership_index(onto)
    obj_vals: dict[tuple[Iri, Iri], set[Iri]] = defaultdict(set)
    lit_vals: dict[tuple[Iri, Iri], set[str]] = defaultdict(set)
    counts: dict[tuple[Iri, Iri], int] = defaultdict(int)
    for ax in onto.axioms:
        if isinstance(ax, ObjectAssertion):
            obj_vals[(ax.subject, ax.prop)].add(ax.obj)
            counts[(ax.subject, ax.prop)] += 1
        elif isinstance(ax, DataAssertion):
            lit_vals[(ax.subject, ax.prop)].add(ax.literal)
            counts[(ax.subject, ax.prop)] += 1

    for r in restrictions:
        affected = sorted(i for i, classes in member_in.items() if r.cls in classes)
        for ind in affected:
            key = (ind, r.prop)
            if r.kind is RestrictionKind.VALUE:
                if key not in counts:
                    continue  # nothing asserted; nothing to falsify
                if not _expr_satisfied(r.value, obj_vals[key], lit_vals[key]):
                    out.append(
                        Violation(
                            "R5",
                            RULE_SEVERITY["R5"],
                            f"<{ind}> carries <{r.prop}> values that do not satisfy "
                            f"the value restriction on <{r.cls}>",
                            frozenset({ind, r.prop, r.cls}),
                        )
                    )
                continue
            n = counts.get(key, 0)
            ok = (
                n >= r.value
                if r.kind is RestrictionKind.MIN
                else n <= r.value
                if r.kind is RestrictionKind.MAX
                else n == r.value
            )
            if not ok:
                out.append(
                    Violation(
                        "R5",
                        RULE_SEVERITY["R5"],
                        f"<{ind}> has {n} assertion(s) on <{r.prop}>, violating "
                        f"{r.kind.value} {r.value} declared on <{r.cls}>",
                        frozenset({ind, r.prop, r.cls}),
                    )
                )
    return out


def _r7_characteristics(onto: Ontology) -> list[Violation]:
    out = []
    functional: set[Iri] = set()
    inverse_functional: set[Iri] = set()
    for ax in onto.axioms:
        if isinstance(ax, PropertyCharacteristic):
            if ax.characteristic is Characteristic.FUNCTIONAL:
                functional.add(ax.prop)
            elif ax.characteristic is Characteristic.INVERSE_FUNCTIONAL:
                inverse_functional.add(ax.prop)
    if not functional and not inverse_functional:
        return out
    fwd_obj: dict[tuple[Iri, Iri], set[Iri]] = defaultdict(set)
    fwd_lit: dict[tuple[Iri, Iri], set[str]] = defaultdict(set)
    rev: dict[tuple[Iri, Iri], set[Iri]] = defaultdict(set)
    for ax in onto.axioms:
        if isinstance(ax, ObjectAssertion):
            if ax.prop in functional:
                fwd_obj[(ax.subject, ax.prop)].add(ax.obj)
            if ax.prop in inverse_functional:
                rev[(ax.obj, ax.prop)].add(ax.subject)
        elif isinstance(ax, DataAssertion) and ax.prop in functional:
            fwd_lit[(ax.subject, ax.prop)].add(ax.literal)
    for (subj, prop), objs in fwd_obj.items():
        if len(objs) > 1:
            out.append(
                Violation(
                    "R7",
                    RULE_SEVERITY["R7"],
                    f"functional <{prop}> holds {len(objs)} distinct values for <{subj}>",
                    frozenset({subj, prop} | objs),
                )
            )
    for (subj, prop), lits in fwd_lit.items():
        if len(lits) > 1:
            out.append(
                Violation(
                    "R7",
                    RULE_SEVERITY["R7"],
                    f"functional <{prop}> holds {len(lits)} distinct literals for <{subj}>",
                    frozenset({subj, prop}),
                )
            )
    for (obj, prop), subjects in rev.items():
        if len(subjects) > 1:
            out.append(
                Violation(
                    "R7",
                    RULE_SEVERITY["R7"],
                    f"inverse-functional <{prop}> reaches <{obj}> from "
                    f"{len(subjects)} distinct subjects",
                    frozenset({obj, prop} | subjects),
                )
            )
    return out


# -- gating a change sequence -----------------------------------------------------

_CAUSE_RULE = (
    (AlreadyDeclaredError, "R6"),
    (DuplicateAxiomError, "R6"),
    (HierarchyCycleError, "R2"),
    (DanglingReferenceError, "R1"),
    (NotPresentError, "R1"),
)


def check_changes(ops: Sequence[ChangeOp], onto: Ontology) -> list[Violation]:
    """Gate an op sequence against a snapshot.

    Three stages: the R3 ordering scan (instance ops may only reference
    entities the snapshot or an earlier op in the sequence provides); a
    dry-run fold mapping application failures onto rule ids; and a full
    check of the resulting snapshot, reporting only findings the sequence
    introduced, each attributed to the earliest op touching it.
    """
    r3 = _r3_ordering(ops, onto)
    if r3:
        return sorted(r3, key=_sort_key)

    try:
        after, _ = apply_all(ops, onto)
    except ChangeError as err:
        for exc_type, rule in _CAUSE_RULE:
            if isinstance(err.cause, exc_type):
                return [
                    Violation(
                        rule,
                        RULE_SEVERITY[rule],
                        f"op at position {err.index} cannot apply: {err.cause}",
                        affected_entities(err.op),
                    )
                ]
        raise

    before = {(v.rule, v.involved) for v in check_ontology(onto)}
    introduced = [
        v for v in check_ontology(after) if (v.rule, v.involved) not in before
    ]
    attributed = []
    for v in introduced:
        position = None
        for i, op in enumerate(ops):
            if affected_entities(op) & v.involved:
                position = i
                break
        if position is None:
            attributed.append(v)
        else:
            attributed.append(
                Violation(
                    v.rule,
                    v.severity,
                    f"{v.message} (introduced by op at position {position})",
                    v.involved,
                )
            )
    return sorted(attributed, key=_sort_key)


def _r3_ordering(ops: Sequence[ChangeOp], onto: Ontology) -> list[Violation]:
    available = set(onto.entities)
    out = []
    for i, op in enumerate(ops):
        if category(op) is Category.INSTANCE:
            refs = set(affected_entities(op))
            if isinstance(op.target, EntityDecl):
                refs.discard(op.target.iri)
            missing = refs - available
            if missing:
                names = ", ".join(sorted(f"<{m}>" for m in missing))
                out.append(
                    Violation(
                        "R3",
                        RULE_SEVERITY["R3"],
                        f"instance-level op at position {i} references schema "
                        f"not yet available: {names}",
                        frozenset(missing),
                    )
                )
        if op.direction is Direction.ADD and isinstance(op.target, EntityDecl):
            available.add(op.target.iri)
    return out
