"""Record-oriented text format for the version log.

A file is a sequence of records: a subject reference on its own line,
then indented `predicate object;` pairs.  `#` starts a full-line comment.
Version records chain through p:hasPreviousVersionGraph and point at one
change-set record, whose pairs name the ops in order; ops with more than
one field get their own numbered record.

Emission is canonical (two-space indent, one pair per line, records
separated by a blank line) and prefix-stable: serializing a longer chain
reproduces the shorter chain's output byte for byte, so committing can
append to the log file instead of rewriting it.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .changes import ChangeOp, Category, Direction, EntityDecl
from .errors import (
    ChainError,
    InvalidChainError,
    ParseError,
    UnresolvedReferenceError,
)
from .events import CommitEvent
from .model import (
    Axiom,
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
    PropertyCharacteristic,
    PropertyDomain,
    PropertyRange,
    Resource,
    RestrictionKind,
    SubClassOf,
    SubPropertyOf,
    ValueExpr,
)
from .ontformat import parse_statement, quote, render_statement, unquote
from .valueexpr import parse_value_expr, render_value_expr
from .versioning import (
    BaseRef,
    ChangeSet,
    VersionContext,
    VersionGraph,
    VersionRef,
    parse_date,
    render_date,
)

# -- generic record layer --------------------------------------------------------


@dataclass(frozen=True)
class ScriptValue:
    """One pair object: a reference, a quoted string, or raw text."""

    kind: str  # "ref" | "str" | "raw"
    text: str


@dataclass(frozen=True)
class Pair:
    predicate: str
    value: ScriptValue
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ScriptRecord:
    subject: str
    pairs: tuple[Pair, ...]
    line: int = field(default=0, compare=False)


_SUBJECT_RE = re.compile(r"^<([^<>]*)>$")


def _parens_balanced(text: str) -> bool:
    depth = 0
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == '"':
            i += 1
            while i < n:
                if text[i] == "\\":
                    i += 2
                elif text[i] == '"':
                    break
                else:
                    i += 1
            if i >= n:
                return False  # open string literal
            i += 1
            continue
        if c == "<":
            j = text.find(">", i + 1)
            if j < 0:
                return False
            i = j + 1
            continue
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        i += 1
    return depth == 0


def _classify(text: str, line: int) -> ScriptValue:
    if text.startswith('"'):
        return ScriptValue("str", unquote(text, line))
    m = _SUBJECT_RE.match(text)
    if m:
        return ScriptValue("ref", m.group(1))
    return ScriptValue("raw", text)


def parse_records(text: str) -> list[ScriptRecord]:
    """Tolerant reader: indentation is free, a pair may wrap onto further
    lines until its parentheses balance, and the trailing ';' is optional."""
    records: list[ScriptRecord] = []
    subject: str | None = None
    subject_line = 0
    pairs: list[Pair] = []
    pending: list | None = None  # [predicate, text-so-far, line]

    def flush_record():
        nonlocal subject, pairs
        if subject is not None:
            records.append(ScriptRecord(subject, tuple(pairs), subject_line))
        subject = None
        pairs = []

    def complete_if_ready(force: bool = False):
        nonlocal pending
        if pending is None:
            return
        pred, text, line = pending
        t = text.strip()
        done = force
        if t.endswith(";"):
            t = t[:-1].rstrip()
            done = True
        elif t and _parens_balanced(t):
            done = True
        if not done:
            pending[1] = t
            return
        if not t:
            raise ParseError(f"predicate {pred!r} has no object", line)
        pairs.append(Pair(pred, _classify(t, line), line))
        pending = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        if pending is not None:
            pending[1] = f"{pending[1]} {s}" if pending[1] else s
            complete_if_ready()
            continue
        m = _SUBJECT_RE.match(s)
        if m:
            flush_record()
            subject = m.group(1)
            subject_line = lineno
            continue
        if subject is None:
            raise ParseError("pair line outside any record", lineno)
        head, _, rest = s.partition(" ")
        if head.startswith("<"):
            raise ParseError("malformed record subject", lineno, expected="<subject>")
        pending = [head, rest.strip(), lineno]
        complete_if_ready()

    complete_if_ready(force=True)
    flush_record()
    return records


def render_value(value: ScriptValue) -> str:
    if value.kind == "ref":
        return f"<{value.text}>"
    if value.kind == "str":
        return quote(value.text)
    return value.text


def render_record(record: ScriptRecord) -> str:
    lines = [f"<{record.subject}>"]
    lines.extend(f"  {p.predicate} {render_value(p.value)};" for p in record.pairs)
    return "\n".join(lines) + "\n"


def render_records(records: Iterable[ScriptRecord]) -> str:
    return "\n".join(render_record(r) for r in records)


# -- op vocabulary -----------------------------------------------------------------


def _ref(iri: Iri) -> ScriptValue:
    return ScriptValue("ref", str(iri))


def _expr_value(expr: ValueExpr) -> ScriptValue:
    if isinstance(expr, Resource):
        return _ref(expr.iri)
    return ScriptValue("raw", render_value_expr(expr))


def _restriction_sort(prop: Iri, kinds: dict[Iri, EntityKind]) -> str:
    # the axiom does not store the property sort; resolve it from the
    # declarations seen so far, defaulting to the data form
    return "Object" if kinds.get(prop) is EntityKind.OBJECT_PROPERTY else "Data"


def _op_parts(op: ChangeOp, kinds: dict[Iri, EntityKind]):
    """(kind-key, record-type or None, field pairs or None) for one op.

    The predicate is p:has{direction}{kind-key}; a None record type means
    the op serializes as a direct object on the change-set record.
    """
    t = op.target
    d = op.direction.value
    if isinstance(t, EntityDecl):
        if t.kind is EntityKind.INDIVIDUAL:
            return "Individual", f"{d}Individual", [("p:individual", _ref(t.iri))]
        return t.kind.value, None, None
    if isinstance(t, SubClassOf):
        return (
            "ClassHierarchyLink",
            "ClassHierarchyLink",
            [("p:class", _ref(t.child)), ("p:subClass", _ref(t.parent))],
        )
    if isinstance(t, SubPropertyOf):
        return (
            "PropertyHierarchyLink",
            "PropertyHierarchyLink",
            [("p:property", _ref(t.child)), ("p:subProperty", _ref(t.parent))],
        )
    if isinstance(t, ClassObjectPropertyLink):
        return (
            "ClassObjectPropertyLink",
            "ClassObjectPropertyLink",
            [
                ("p:class", _ref(t.cls)),
                ("p:objectProperty", _ref(t.prop)),
                ("p:value", _expr_value(t.value)),
            ],
        )
    if isinstance(t, ClassDataPropertyLink):
        return (
            "ClassDataPropertyLink",
            "ClassDataPropertyLink",
            [
                ("p:class", _ref(t.cls)),
                ("p:dataProperty", _ref(t.prop)),
                ("p:value", _expr_value(t.value)),
            ],
        )
    if isinstance(t, ClassPropertyRestriction):
        sort = _restriction_sort(t.prop, kinds)
        name = f"Class{sort}PropertyCardinality"
        prop_pred = "p:objectProperty" if sort == "Object" else "p:dataProperty"
        fields = [("p:class", _ref(t.cls)), (prop_pred, _ref(t.prop))]
        if t.kind is RestrictionKind.VALUE:
            fields.append(("p:value", _expr_value(t.value)))
        else:
            fields.append(("p:restriction", ScriptValue("str", t.kind.value)))
            fields.append(("p:value", ScriptValue("str", str(t.value))))
        return name, name, fields
    if isinstance(t, PropertyDomain):
        return (
            "PropertyAttributeLink",
            "PropertyAttributeLink",
            [("p:property", _ref(t.prop)), ("p:domain", _ref(t.cls))],
        )
    if isinstance(t, PropertyRange):
        return (
            "PropertyAttributeLink",
            "PropertyAttributeLink",
            [("p:property", _ref(t.prop)), ("p:range", _ref(t.target))],
        )
    if isinstance(t, PropertyCharacteristic):
        return (
            "TypeProperty",
            "TypeProperty",
            [
                ("p:property", _ref(t.prop)),
                ("p:type", ScriptValue("str", t.characteristic.value)),
            ],
        )
    if isinstance(t, DisjointClasses):
        return (
            "DisjointClasses",
            "DisjointClasses",
            [("p:class", _ref(t.a)), ("p:class", _ref(t.b))],
        )
    if isinstance(t, ClassMembership):
        return (
            "MemberClass",
            f"{d}MemberClass",
            [("p:individual", _ref(t.individual)), ("p:class", _ref(t.cls))],
        )
    if isinstance(t, ObjectAssertion):
        return (
            "ObjectPropertyAssertion",
            f"{d}ObjectPropertyAssertion",
            [
                ("p:individual", _ref(t.subject)),
                ("p:objectProperty", _ref(t.prop)),
                ("p:value", _ref(t.obj)),
            ],
        )
    if isinstance(t, DataAssertion):
        return (
            "DataPropertyAssertion",
            f"{d}DataPropertyAssertion",
            [
                ("p:individual", _ref(t.subject)),
                ("p:dataProperty", _ref(t.prop)),
                ("p:value", ScriptValue("str", t.literal)),
            ],
        )
    raise TypeError(f"cannot serialize op target {t!r}")


class _LogWriter:
    """Allocates the per-kind record numbers; one instance per file."""

    def __init__(self, base: Ontology | None = None):
        self.kinds: dict[Iri, EntityKind] = dict(base.entities) if base else {}
        self.counters: Counter = Counter()

    def _number(self, name: str) -> int:
        self.counters[name] += 1
        return self.counters[name]

    def _track(self, op: ChangeOp) -> None:
        if op.direction is Direction.ADD and isinstance(op.target, EntityDecl):
            self.kinds[op.target.iri] = op.target.kind

    def op_pair_and_record(self, op: ChangeOp) -> tuple[Pair, ScriptRecord | None]:
        key, rtype, fields = _op_parts(op, self.kinds)
        self._track(op)
        pred = f"p:has{op.direction.value}{key}"
        if rtype is None:
            return Pair(pred, _ref(op.target.iri)), None
        num = self._number(rtype)
        subject = f"vg:{rtype}#{rtype}{num}"
        record = ScriptRecord(
            subject, tuple(Pair(p, v) for p, v in fields)
        )
        return Pair(pred, ScriptValue("ref", subject)), record

    def version_blocks(self, vg: VersionGraph) -> list[str]:
        ctx = vg.context
        subject = f"vg:VersionGraph#VersionGraph{ctx.id}"
        if ctx.id == 0:
            prev = ScriptValue("ref", vg.previous.label)
            rec = ScriptRecord(subject, (Pair("p:hasPreviousVersionGraph", prev),))
            return [render_record(rec)]

        cat_name = "Schema" if vg.payload.category is Category.SCHEMA else "Instance"
        cs_type = f"{cat_name}VersionGraph"
        cs_num = self._number(cs_type)
        cs_subject = f"vg:{cs_type}#{cs_type}{cs_num}"

        cs_pairs: list[Pair] = []
        op_records: list[ScriptRecord] = []
        for op in vg.payload.ops:
            pair, record = self.op_pair_and_record(op)
            cs_pairs.append(pair)
            if record is not None:
                op_records.append(record)
        for axiom in vg.cascade_annex:
            cs_pairs.append(
                Pair("p:hasCascadedLoss", ScriptValue("str", render_statement(axiom)))
            )

        vg_pairs = [
            Pair(
                "p:hasPreviousVersionGraph",
                ScriptValue("ref", f"vg:VersionGraph#VersionGraph{ctx.id - 1}"),
            )
        ]
        if ctx.date is not None:
            vg_pairs.append(Pair("p:hasDate", ScriptValue("str", render_date(ctx.date))))
        if ctx.author:
            vg_pairs.append(Pair("p:hasAuthor", ScriptValue("str", ctx.author)))
        if ctx.description:
            vg_pairs.append(
                Pair("p:hasDescription", ScriptValue("str", ctx.description))
            )
        vg_pairs.append(Pair(f"p:has{cs_type}", ScriptValue("ref", cs_subject)))

        blocks = [
            f"# VersionGraph{ctx.id} description\n"
            + render_record(ScriptRecord(subject, tuple(vg_pairs))),
            f"# Associated{cs_type}{cs_num} description\n"
            + render_record(ScriptRecord(cs_subject, tuple(cs_pairs))),
        ]
        for i, record in enumerate(op_records):
            text = render_record(record)
            if i == 0:
                text = f"# Description of {cat_name}Operation used\n" + text
            blocks.append(text)
        return blocks


def _check_chain(chain: Sequence[VersionGraph]) -> None:
    if not chain:
        raise InvalidChainError("a chain holds at least the initial record")
    for i, vg in enumerate(chain):
        if vg.context.id != i:
            raise InvalidChainError(
                f"record ids must run 0..{len(chain) - 1}; found {vg.context.id} at {i}"
            )
        if i == 0:
            if not isinstance(vg.previous, BaseRef):
                raise InvalidChainError("record 0 must link the base ontology")
            if vg.payload is not None:
                raise InvalidChainError("record 0 carries no payload")
            if vg.context.date is not None:
                raise InvalidChainError("record 0 carries no date")
        else:
            if vg.previous != VersionRef(i - 1):
                raise InvalidChainError(
                    f"record {i} must link record {i - 1}, not {vg.previous!r}"
                )
            if vg.payload is None:
                raise InvalidChainError(f"record {i} has no payload")


def render_version_segments(
    chain: Sequence[VersionGraph], base: Ontology | None = None
) -> list[str]:
    """One text segment per version, in id order; the full log is the
    blank-line join of the segments (prefix stability falls out of that)."""
    _check_chain(chain)
    writer = _LogWriter(base)
    return ["\n".join(writer.version_blocks(vg)) for vg in chain]


def serialize_version_log(
    chain: Sequence[VersionGraph], base: Ontology | None = None
) -> str:
    return "\n".join(render_version_segments(chain, base))


# -- parsing the log ---------------------------------------------------------------

_VERSION_LOCAL_RE = re.compile(r"^VersionGraph(\d+)$")
_PRED_RE = re.compile(r"^p:has(Add|Remove)([A-Za-z]+)$")


class _FieldView:
    """Validated access to one record's pairs."""

    def __init__(self, record: ScriptRecord):
        self.record = record

    def _all(self, *names: str) -> list[Pair]:
        return [p for p in self.record.pairs if p.predicate in names]

    def one(self, *names: str) -> Pair:
        found = self._all(*names)
        if len(found) != 1:
            raise ParseError(
                f"record <{self.record.subject}> needs exactly one "
                f"{' / '.join(names)} pair, found {len(found)}",
                self.record.line,
            )
        return found[0]

    def maybe(self, *names: str) -> Pair | None:
        found = self._all(*names)
        if len(found) > 1:
            raise ParseError(
                f"record <{self.record.subject}> repeats {' / '.join(names)}",
                self.record.line,
            )
        return found[0] if found else None

    def ref(self, *names: str) -> Iri:
        pair = self.one(*names)
        if pair.value.kind != "ref":
            raise ParseError(
                f"{pair.predicate} needs a reference object", pair.line
            )
        return Iri.parse(pair.value.text)

    def string(self, *names: str) -> str:
        pair = self.one(*names)
        if pair.value.kind != "str":
            raise ParseError(f"{pair.predicate} needs a quoted object", pair.line)
        return pair.value.text

    def expr(self, *names: str) -> ValueExpr:
        pair = self.one(*names)
        if pair.value.kind == "ref":
            return Resource(Iri.parse(pair.value.text))
        if pair.value.kind == "raw":
            return parse_value_expr(pair.value.text, pair.line)
        raise ParseError(f"{pair.predicate} needs a value expression", pair.line)


def _parse_op_record(direction: Direction, key: str, record: ScriptRecord) -> ChangeOp:
    f = _FieldView(record)
    if key == "Individual":
        return ChangeOp(
            direction, EntityDecl(EntityKind.INDIVIDUAL, f.ref("p:individual"))
        )
    if key == "ClassHierarchyLink":
        return ChangeOp(direction, SubClassOf(f.ref("p:class"), f.ref("p:subClass")))
    if key == "PropertyHierarchyLink":
        return ChangeOp(
            direction, SubPropertyOf(f.ref("p:property"), f.ref("p:subProperty"))
        )
    if key == "ClassObjectPropertyLink":
        return ChangeOp(
            direction,
            ClassObjectPropertyLink(
                f.ref("p:class"),
                f.ref("p:objectProperty", "p:property"),
                f.expr("p:value"),
            ),
        )
    if key == "ClassDataPropertyLink":
        return ChangeOp(
            direction,
            ClassDataPropertyLink(
                f.ref("p:class"),
                f.ref("p:dataProperty", "p:property"),
                f.expr("p:value"),
            ),
        )
    if key in ("ClassDataPropertyCardinality", "ClassObjectPropertyCardinality"):
        cls = f.ref("p:class")
        prop = f.ref("p:dataProperty", "p:objectProperty", "p:property")
        marker = f.maybe("p:restriction")
        if marker is None:
            kind = RestrictionKind.VALUE
            value: ValueExpr | int = f.expr("p:value")
        else:
            try:
                kind = RestrictionKind(marker.value.text)
            except ValueError:
                raise ParseError(
                    f"unknown restriction kind {marker.value.text!r}", marker.line
                ) from None
            if kind is RestrictionKind.VALUE:
                value = f.expr("p:value")
            else:
                bound = f.string("p:value")
                if not bound.isdigit():
                    raise ParseError(
                        f"cardinality bound must be an integer: {bound!r}",
                        record.line,
                    )
                value = int(bound)
        return ChangeOp(direction, ClassPropertyRestriction(cls, prop, kind, value))
    if key == "PropertyAttributeLink":
        prop = f.ref("p:property")
        domain = f.maybe("p:domain")
        rng = f.maybe("p:range")
        if (domain is None) == (rng is None):
            raise ParseError(
                f"record <{record.subject}> needs exactly one of p:domain / p:range",
                record.line,
            )
        if domain is not None:
            return ChangeOp(direction, PropertyDomain(prop, f.ref("p:domain")))
        return ChangeOp(direction, PropertyRange(prop, f.ref("p:range")))
    if key == "TypeProperty":
        text = f.string("p:type")
        try:
            characteristic = Characteristic(text)
        except ValueError:
            raise ParseError(
                f"unknown property characteristic {text!r}", record.line
            ) from None
        return ChangeOp(
            direction, PropertyCharacteristic(f.ref("p:property"), characteristic)
        )
    if key == "DisjointClasses":
        classes = [p for p in record.pairs if p.predicate == "p:class"]
        if len(classes) != 2:
            raise ParseError(
                f"record <{record.subject}> needs two p:class pairs", record.line
            )
        pair_a, pair_b = classes
        return ChangeOp(
            direction,
            DisjointClasses(Iri.parse(pair_a.value.text), Iri.parse(pair_b.value.text)),
        )
    if key == "MemberClass":
        return ChangeOp(
            direction, ClassMembership(f.ref("p:individual"), f.ref("p:class"))
        )
    if key == "ObjectPropertyAssertion":
        return ChangeOp(
            direction,
            ObjectAssertion(
                f.ref("p:individual"), f.ref("p:objectProperty"), f.ref("p:value")
            ),
        )
    if key == "DataPropertyAssertion":
        return ChangeOp(
            direction,
            DataAssertion(
                f.ref("p:individual"), f.ref("p:dataProperty"), f.string("p:value")
            ),
        )
    raise ParseError(f"unknown change record type {key!r}", record.line)


_DIRECT_DECL_KINDS = {
    "Class": EntityKind.CLASS,
    "ObjectProperty": EntityKind.OBJECT_PROPERTY,
    "DataProperty": EntityKind.DATA_PROPERTY,
    "Individual": EntityKind.INDIVIDUAL,
}


class _LogReader:
    def __init__(self, text: str):
        self.by_subject: dict[str, ScriptRecord] = {}
        self.order: list[ScriptRecord] = parse_records(text)
        for record in self.order:
            if record.subject in self.by_subject:
                raise ParseError(
                    f"duplicate record subject <{record.subject}>", record.line
                )
            self.by_subject[record.subject] = record

    def resolve(self, pair: Pair) -> ScriptRecord:
        if pair.value.kind != "ref":
            raise ParseError(f"{pair.predicate} needs a reference object", pair.line)
        record = self.by_subject.get(pair.value.text)
        if record is None:
            raise UnresolvedReferenceError(f"<{pair.value.text}>", pair.line)
        return record

    def parse_op(self, pair: Pair) -> ChangeOp:
        m = _PRED_RE.match(pair.predicate)
        if m is None:
            raise ParseError(
                f"unknown change predicate {pair.predicate!r}", pair.line
            )
        direction = Direction.ADD if m.group(1) == "Add" else Direction.REMOVE
        key = m.group(2)
        if pair.value.kind != "ref":
            raise ParseError(f"{pair.predicate} needs a reference object", pair.line)
        target_ns = pair.value.text.split("#", 1)[0]
        if not target_ns.startswith("vg:"):
            kind = _DIRECT_DECL_KINDS.get(key)
            if kind is None:
                raise ParseError(
                    f"{pair.predicate} needs a change record reference", pair.line
                )
            return ChangeOp(direction, EntityDecl(kind, Iri.parse(pair.value.text)))
        return _parse_op_record(direction, key, self.resolve(pair))


def _changeset_pairs(reader: _LogReader, record: ScriptRecord):
    ops: list[ChangeOp] = []
    annex: list[Axiom] = []
    for pair in record.pairs:
        if pair.predicate == "p:hasCascadedLoss":
            if pair.value.kind != "str":
                raise ParseError("p:hasCascadedLoss needs a quoted statement", pair.line)
            stmt = parse_statement(pair.value.text, pair.line)
            if not isinstance(stmt, Axiom):
                raise ParseError(
                    "p:hasCascadedLoss must name an axiom, not a declaration",
                    pair.line,
                )
            annex.append(stmt)
        else:
            ops.append(reader.parse_op(pair))
    return ops, annex


def parse_version_log(text: str) -> list[VersionGraph]:
    """Records back into a chain; chain-shape problems raise ChainError,
    anything textual raises ParseError with the offending line."""
    reader = _LogReader(text)
    versions = [
        r
        for r in reader.order
        if r.subject.split("#", 1)[0] == "vg:VersionGraph"
        and _VERSION_LOCAL_RE.match(r.subject.split("#", 1)[1] if "#" in r.subject else "")
    ]
    if not versions:
        raise ChainError("no version records found")

    chain: list[VersionGraph] = []
    for expected_id, record in enumerate(versions):
        local = record.subject.split("#", 1)[1]
        vid = int(_VERSION_LOCAL_RE.match(local).group(1))
        if vid != expected_id:
            raise ChainError(
                f"version ids must run 0..{len(versions) - 1} in order; "
                f"found VersionGraph{vid} where {expected_id} was expected"
            )
        f = _FieldView(record)
        prev_pair = f.one("p:hasPreviousVersionGraph")
        if prev_pair.value.kind != "ref":
            raise ParseError("p:hasPreviousVersionGraph needs a reference", prev_pair.line)
        prev_text = prev_pair.value.text

        if vid == 0:
            if prev_text.startswith("vg:VersionGraph#"):
                raise ChainError("record 0 must link the base ontology, not a version")
            extra = [p for p in record.pairs if p.predicate != "p:hasPreviousVersionGraph"]
            if extra:
                raise ChainError(
                    f"record 0 carries only the base link; found {extra[0].predicate}"
                )
            chain.append(
                VersionGraph(
                    context=VersionContext(id=0, date=None),
                    previous=BaseRef(prev_text),
                )
            )
            continue

        if prev_text != f"vg:VersionGraph#VersionGraph{vid - 1}":
            raise ChainError(
                f"VersionGraph{vid} must link VersionGraph{vid - 1}; "
                f"found <{prev_text}> (branching or gaps are not representable)"
            )
        schema_pair = f.maybe("p:hasSchemaVersionGraph")
        instance_pair = f.maybe("p:hasInstanceVersionGraph")
        if (schema_pair is None) == (instance_pair is None):
            raise ChainError(
                f"VersionGraph{vid} needs exactly one change-set link "
                "(p:hasSchemaVersionGraph or p:hasInstanceVersionGraph)"
            )
        category = Category.SCHEMA if schema_pair is not None else Category.INSTANCE
        cs_record = reader.resolve(schema_pair or instance_pair)
        ops, annex = _changeset_pairs(reader, cs_record)
        date_pair = f.maybe("p:hasDate")
        when = None
        if date_pair is not None:
            if date_pair.value.kind != "str":
                raise ParseError("p:hasDate needs a quoted date", date_pair.line)
            try:
                when = parse_date(date_pair.value.text)
            except ValueError:
                raise ParseError(
                    f"unreadable date {date_pair.value.text!r}", date_pair.line
                ) from None
        author_pair = f.maybe("p:hasAuthor")
        desc_pair = f.maybe("p:hasDescription")
        try:
            payload = ChangeSet(category, tuple(ops))
        except ValueError as exc:
            raise ChainError(f"VersionGraph{vid}: {exc}") from exc
        chain.append(
            VersionGraph(
                context=VersionContext(
                    id=vid,
                    date=when,
                    author=author_pair.value.text if author_pair else "",
                    description=desc_pair.value.text if desc_pair else "",
                ),
                previous=VersionRef(vid - 1),
                payload=payload,
                cascade_annex=tuple(annex),
            )
        )
    return chain


# -- staging and events --------------------------------------------------------------

_STAGING_SUBJECT = "vg:Staging#Staging1"


def serialize_staging(ops: Sequence[ChangeOp], head: Ontology | None = None) -> str:
    if not ops:
        return ""
    writer = _LogWriter(head)
    pairs: list[Pair] = []
    op_records: list[ScriptRecord] = []
    for op in ops:
        pair, record = writer.op_pair_and_record(op)
        pairs.append(pair)
        if record is not None:
            op_records.append(record)
    records = [ScriptRecord(_STAGING_SUBJECT, tuple(pairs))] + op_records
    return render_records(records)


def parse_staging(text: str) -> list[ChangeOp]:
    if not text.strip():
        return []
    reader = _LogReader(text)
    staging = reader.by_subject.get(_STAGING_SUBJECT)
    if staging is None:
        raise ParseError(f"no <{_STAGING_SUBJECT}> record found", 1)
    return [reader.parse_op(pair) for pair in staging.pairs]


def render_event_record(event: CommitEvent) -> str:
    """One appended record per delivered commit event."""
    pairs = [
        Pair(
            "p:hasVersion",
            ScriptValue("ref", f"vg:VersionGraph#VersionGraph{event.version_id}"),
        ),
        Pair("p:hasCategory", ScriptValue("str", event.category.value)),
    ]
    if event.context.date is not None:
        pairs.append(
            Pair("p:hasDate", ScriptValue("str", render_date(event.context.date)))
        )
    if event.context.author:
        pairs.append(Pair("p:hasAuthor", ScriptValue("str", event.context.author)))
    for iri in sorted(event.affected):
        pairs.append(Pair("p:hasAffected", ScriptValue("ref", str(iri))))
    record = ScriptRecord(
        f"vg:CommitEvent#CommitEvent{event.version_id}", tuple(pairs)
    )
    return render_record(record) + "\n"
