"""The version graph and the repository built on it.

Every committed version is a record chained to its predecessor; record 0
carries only the link to the base ontology.  Any snapshot is recoverable
by replaying payloads over the base, which keeps the log the single
source of truth.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import date as date_type, datetime
from typing import Sequence, Union

from .changes import (
    Category,
    ChangeOp,
    ComposedOp,
    ImpactReport,
    affected_entities,
    apply_all,
    category,
    decompose,
    impact,
    invert,
    op_kind,
)
from .consistency import Severity, Violation, check_changes, check_ontology
from .errors import (
    BlockedByViolationsError,
    EmptyStagingError,
    InconsistentBaseError,
    MixedChangeSetError,
    OutOfRangeError,
    ReentrantMutationError,
    UnknownVersionError,
)
from .events import CommitEvent, Registry
from .model import Axiom, Iri, Ontology


@dataclass(frozen=True)
class VersionContext:
    """Who, when, why; id 0 (the base record) carries no date."""

    id: int
    date: date_type | None
    author: str = ""
    description: str = ""


@dataclass(frozen=True)
class BaseRef:
    """Link from record 0 to the ontology the history starts from."""

    label: str


@dataclass(frozen=True)
class VersionRef:
    id: int


PreviousRef = Union[BaseRef, VersionRef]


@dataclass(frozen=True)
class ChangeSet:
    """Homogeneous op sequence: all schema or all instance."""

    category: Category
    ops: tuple[ChangeOp, ...]

    def __post_init__(self):
        for op in self.ops:
            if category(op) is not self.category:
                raise ValueError(
                    f"{op_kind(op)} is not a {self.category.value} change"
                )


@dataclass(frozen=True)
class VersionGraph:
    """One chained version record.

    payload is None exactly for record 0; cascade_annex keeps the axioms
    an entity removal swept away, so the loss stays reconstructible.
    """

    context: VersionContext
    previous: PreviousRef
    payload: ChangeSet | None = None
    cascade_annex: tuple[Axiom, ...] = ()


@dataclass(frozen=True)
class FindCriteria:
    """Conjunctive retrieval filter; None fields do not constrain."""

    author: str | None = None
    since: date_type | None = None
    until: date_type | None = None
    affected_entity: Iri | None = None
    op_kind: str | None = None
    category: Category | None = None


@dataclass(frozen=True)
class PreviewReport:
    """What commit would do right now, without doing it."""

    ops: tuple[ChangeOp, ...]
    split: tuple[ChangeSet, ...]
    impact: ImpactReport
    violations: tuple[Violation, ...]


def parse_date(text: str) -> date_type:
    """Accepts the log form DD/MM/YYYY and ISO YYYY-MM-DD."""
    t = text.strip()
    try:
        return datetime.strptime(t, "%d/%m/%Y").date()
    except ValueError:
        return date_type.fromisoformat(t)


def render_date(d: date_type) -> str:
    return d.strftime("%d/%m/%Y")


class Repository:
    """Mutable working state: base, committed chain, staging area.

    All mutations run under one lock; event sinks may read but never
    mutate (guarded against re-entrancy).  Cross-process serialization is
    the storage layer's problem, not this class's.
    """

    def __init__(self, base: Ontology):
        violations = check_ontology(base)
        if violations:
            raise InconsistentBaseError(violations)
        self.base = base
        self.chain: list[VersionGraph] = [
            VersionGraph(
                context=VersionContext(id=0, date=None),
                previous=BaseRef(base.label),
            )
        ]
        self.staging: list[ChangeOp] = []
        self.events = Registry()
        self._head = base
        self._lock = threading.RLock()
        self._delivering = False

    @classmethod
    def _assemble(
        cls,
        base: Ontology,
        chain: Sequence[VersionGraph],
        staging: Sequence[ChangeOp],
    ) -> "Repository":
        """Rebuild from parsed parts, skipping the clean-base gate; the
        storage layer validates replay separately."""
        repo = cls.__new__(cls)
        repo.base = base
        repo.chain = list(chain)
        repo.staging = list(staging)
        repo.events = Registry()
        head = base
        for vg in repo.chain[1:]:
            head, _ = apply_all(vg.payload.ops, head)
        repo._head = head
        repo._lock = threading.RLock()
        repo._delivering = False
        return repo

    def __eq__(self, other) -> bool:
        if not isinstance(other, Repository):
            return NotImplemented
        return (
            self.base == other.base
            and self.base.label == other.base.label
            and self.chain == other.chain
            and self.staging == other.staging
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"Repository({len(self.chain)} versions, "
            f"{len(self.staging)} staged, head={self._head!r})"
        )

    # -- properties --

    @property
    def head(self) -> Ontology:
        return self._head

    @property
    def head_id(self) -> int:
        return self.chain[-1].context.id

    # -- staging --

    def _guard(self) -> None:
        if self._delivering:
            raise ReentrantMutationError()

    def preview_state(self) -> Ontology:
        """head with the staged ops folded in; what the next commit sees."""
        with self._lock:
            onto, _ = apply_all(self.staging, self._head)
            return onto

    def stage(self, op: ChangeOp | ComposedOp) -> "Repository":
        """Append an op; composed ops expand against the preview state."""
        with self._lock:
            self._guard()
            if isinstance(op, ComposedOp):
                expanded = decompose(op, self.preview_state())
                self.staging.extend(expanded)
            elif isinstance(op, ChangeOp):
                self.staging.append(op)
            else:
                raise TypeError(f"cannot stage {op!r}")
            return self

    def unstage(self, index: int) -> "Repository":
        with self._lock:
            self._guard()
            if not 0 <= index < len(self.staging):
                raise OutOfRangeError(index, len(self.staging))
            del self.staging[index]
            return self

    def _split_sets(self, split: bool) -> list[ChangeSet]:
        ops = tuple(self.staging)
        cats = {category(op) for op in ops}
        if len(cats) <= 1:
            only = cats.pop() if cats else Category.SCHEMA
            return [ChangeSet(only, ops)] if ops else []
        if not split:
            raise MixedChangeSetError()
        schema = tuple(op for op in ops if category(op) is Category.SCHEMA)
        inst = tuple(op for op in ops if category(op) is Category.INSTANCE)
        return [ChangeSet(Category.SCHEMA, schema), ChangeSet(Category.INSTANCE, inst)]

    def preview(self, split: bool = False) -> PreviewReport:
        """Dry-run of commit: resulting change sets, impact, violations."""
        with self._lock:
            if not self.staging:
                return PreviewReport(
                    ops=(),
                    split=(),
                    impact=impact((), self._head),
                    violations=(),
                )
            sets = self._split_sets(split)
            ordered = tuple(op for cs in sets for op in cs.ops)
            violations = tuple(check_changes(ordered, self._head))
            if any(v.severity is Severity.ERROR for v in violations):
                report = impact((), self._head)  # nothing would land
            else:
                report = impact(ordered, self._head)
            return PreviewReport(
                ops=ordered, split=tuple(sets), impact=report, violations=violations
            )

    # -- committing --

    def commit(
        self,
        *,
        date: date_type | str | None = None,
        author: str = "",
        description: str = "",
        split: bool = False,
    ) -> list[VersionGraph]:
        """Gate the staged ops and append them as one or two versions.

        Mixed staging requires split=True and lands as a schema version
        followed by an instance version.  Returns the new records; any
        consistency Error blocks the whole commit.
        """
        with self._lock:
            self._guard()
            if not self.staging:
                raise EmptyStagingError()
            sets = self._split_sets(split)
            ordered = [op for cs in sets for op in cs.ops]
            violations = check_changes(ordered, self._head)
            if any(v.severity is Severity.ERROR for v in violations):
                raise BlockedByViolationsError(violations)

            if date is None:
                when = date_type.today()
            elif isinstance(date, str):
                when = parse_date(date)
            else:
                when = date

            created: list[VersionGraph] = []
            cur = self._head
            next_id = self.head_id + 1
            for cs in sets:
                cur, cascaded = apply_all(cs.ops, cur)
                desc = description
                if len(sets) > 1:
                    tag = "schema" if cs.category is Category.SCHEMA else "instances"
                    desc = f"{description} ({tag})" if description else f"({tag})"
                vg = VersionGraph(
                    context=VersionContext(
                        id=next_id, date=when, author=author, description=desc
                    ),
                    previous=VersionRef(next_id - 1),
                    payload=cs,
                    cascade_annex=cascaded,
                )
                self.chain.append(vg)
                created.append(vg)
                next_id += 1
            self.staging.clear()
            self._head = cur

            self._delivering = True
            try:
                for vg in created:
                    self.events.publish(
                        CommitEvent(
                            version_id=vg.context.id,
                            category=vg.payload.category,
                            affected=frozenset().union(
                                *(affected_entities(op) for op in vg.payload.ops)
                            ),
                            context=vg.context,
                        )
                    )
            finally:
                self._delivering = False
            return created

    # -- history access --

    def _require(self, version_id: int) -> VersionGraph:
        if not 0 <= version_id <= self.head_id:
            raise UnknownVersionError(version_id)
        return self.chain[version_id]

    def reconstruct(self, version_id: int) -> Ontology:
        """Replay the log up to (and including) the given version."""
        with self._lock:
            self._require(version_id)
            onto = self.base
            for vg in self.chain[1 : version_id + 1]:
                onto, _ = apply_all(vg.payload.ops, onto)
            return onto

    def diff(self, from_id: int, to_id: int) -> list[ChangeOp]:
        """Ops transforming reconstruct(from_id) into reconstruct(to_id).

        Backward spans invert each op; entity removals in the span make
        the inversion impossible and raise NotInvertible.
        """
        with self._lock:
            self._require(from_id)
            self._require(to_id)
            if from_id <= to_id:
                return [
                    op
                    for vg in self.chain[from_id + 1 : to_id + 1]
                    for op in vg.payload.ops
                ]
            forward = [
                op
                for vg in self.chain[to_id + 1 : from_id + 1]
                for op in vg.payload.ops
            ]
            return [invert(op) for op in reversed(forward)]

    def history(self) -> list[VersionContext]:
        with self._lock:
            return [vg.context for vg in self.chain]

    def find(self, criteria: FindCriteria) -> list[VersionGraph]:
        """Versions matching every given criterion; record 0 never matches
        date, op, entity, or category filters (it has none of them)."""
        with self._lock:
            out = []
            for vg in self.chain:
                if self._matches(vg, criteria):
                    out.append(vg)
            return out

    @staticmethod
    def _matches(vg: VersionGraph, c: FindCriteria) -> bool:
        ctx = vg.context
        if c.author is not None and ctx.author != c.author:
            return False
        if c.since is not None and (ctx.date is None or ctx.date < c.since):
            return False
        if c.until is not None and (ctx.date is None or ctx.date > c.until):
            return False
        if c.category is not None:
            if vg.payload is None or vg.payload.category is not c.category:
                return False
        if c.affected_entity is not None:
            if vg.payload is None or not any(
                c.affected_entity in affected_entities(op) for op in vg.payload.ops
            ):
                return False
        if c.op_kind is not None:
            if vg.payload is None or not any(
                op_kind(op) == c.op_kind for op in vg.payload.ops
            ):
                return False
        return True


def init_repository(base: Ontology) -> Repository:
    """Open a fresh history on a consistent base ontology."""
    return Repository(base)
