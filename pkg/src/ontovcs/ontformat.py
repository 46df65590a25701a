"""Statement-per-line text format for ontology snapshots.

One statement per line, `#` line comments, blank lines ignored.
Declarations use the entity-kind name, axioms their variant name:

    Class(<rdfs:class#DessertWine>)
    SubClassOf(<rdfs:class#StrawWine>, <rdfs:class#DessertWine>)
    DataAssertion(<rdf:resource#x>, <owl:DataProperty#hasColor>, "straw gold")

Serialization is canonical: declarations grouped by kind then sorted,
axioms sorted by variant then text, so equal snapshots yield equal bytes.
"""

from __future__ import annotations

from typing import Union

from .changes import EntityDecl
from .errors import OntovcsError, ParseError, SemanticError
from .model import (
    AXIOM_ORDER,
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
    _VARIANT_RANK,
)
from .valueexpr import parse_value_expr, render_value_expr

Statement = Union[EntityDecl, Axiom]

_DECL_NAMES = {k.value: k for k in EntityKind}


def quote(text: str) -> str:
    """Double-quoted literal; only '\"' and '\\\\' are escaped."""
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def unquote(text: str, line: int = 1, col: int = 1) -> str:
    if len(text) < 2 or not text.startswith('"') or not text.endswith('"'):
        raise ParseError("malformed string literal", line, col, expected='"..."')
    out = []
    i = 1
    end = len(text) - 1
    while i < end:
        c = text[i]
        if c == "\\":
            if i + 1 >= end:
                raise ParseError("dangling escape in literal", line, col + i)
            nxt = text[i + 1]
            if nxt not in ('"', "\\"):
                raise ParseError(
                    f"unknown escape \\{nxt}", line, col + i, expected='\\" or \\\\'
                )
            out.append(nxt)
            i += 2
        elif c == '"':
            raise ParseError("unescaped quote inside literal", line, col + i)
        else:
            out.append(c)
            i += 1
    return "".join(out)


# -- argument scanning ------------------------------------------------------------

def _split_args(body: str, line: int, col0: int) -> list[tuple[str, int]]:
    """Split a statement body on top-level commas; returns (text, column)."""
    args: list[tuple[str, int]] = []
    depth = 0
    start = 0
    i = 0
    n = len(body)
    while i < n:
        c = body[i]
        if c == '"':
            j = i + 1
            while j < n:
                if body[j] == "\\":
                    j += 2
                elif body[j] == '"':
                    break
                else:
                    j += 1
            if j >= n:
                raise ParseError("unterminated string literal", line, col0 + i)
            i = j + 1
            continue
        if c == "<":
            j = body.find(">", i + 1)
            if j < 0:
                raise ParseError("unterminated reference", line, col0 + i, expected=">")
            i = j + 1
            continue
        if c == "(":
            depth += 1
        elif c == ")":
            if depth == 0:
                raise ParseError("unbalanced ')'", line, col0 + i)
            depth -= 1
        elif c == "," and depth == 0:
            args.append((body[start:i].strip(), col0 + start))
            start = i + 1
        i += 1
    if depth:
        raise ParseError("unbalanced '('", line, col0 + n)
    args.append((body[start:].strip(), col0 + start))
    return args


def _as_iri(arg: str, line: int, col: int) -> Iri:
    a = arg.strip()
    if not (a.startswith("<") and a.endswith(">")) or "<" in a[1:]:
        raise ParseError(f"not a reference: {arg!r}", line, col, expected="<iri>")
    try:
        return Iri.parse(a)
    except ValueError as exc:
        raise ParseError(str(exc), line, col) from exc


def _as_expr(arg: str, line: int) -> ValueExpr:
    return parse_value_expr(arg, line)


def parse_statement(text: str, line: int = 1) -> Statement:
    """One declaration or axiom from its textual form."""
    s = text.strip()
    open_at = s.find("(")
    if open_at <= 0 or not s.endswith(")"):
        raise ParseError(
            "statement must look like Name(...)", line, 1, expected="Name(...)"
        )
    name = s[:open_at].strip()
    body = s[open_at + 1 : -1]
    col0 = open_at + 2
    args = _split_args(body, line, col0)

    def arity(n: int):
        if len(args) != n:
            raise ParseError(
                f"{name} takes {n} argument(s), got {len(args)}", line, col0
            )

    def iri(i: int) -> Iri:
        return _as_iri(args[i][0], line, args[i][1])

    if name in _DECL_NAMES:
        arity(1)
        return EntityDecl(_DECL_NAMES[name], iri(0))
    if name == "SubClassOf":
        arity(2)
        return SubClassOf(iri(0), iri(1))
    if name == "SubPropertyOf":
        arity(2)
        return SubPropertyOf(iri(0), iri(1))
    if name == "ClassObjectPropertyLink":
        arity(3)
        return ClassObjectPropertyLink(iri(0), iri(1), _as_expr(args[2][0], line))
    if name == "ClassDataPropertyLink":
        arity(3)
        return ClassDataPropertyLink(iri(0), iri(1), _as_expr(args[2][0], line))
    if name == "ClassPropertyRestriction":
        arity(4)
        kind_text = args[2][0]
        try:
            kind = RestrictionKind(kind_text)
        except ValueError:
            raise ParseError(
                f"unknown restriction kind {kind_text!r}",
                line,
                args[2][1],
                expected="value, min, max or exact",
            ) from None
        if kind is RestrictionKind.VALUE:
            value: ValueExpr | int = _as_expr(args[3][0], line)
        else:
            if not args[3][0].isdigit():
                raise ParseError(
                    f"cardinality bound must be an integer: {args[3][0]!r}",
                    line,
                    args[3][1],
                )
            value = int(args[3][0])
        return ClassPropertyRestriction(iri(0), iri(1), kind, value)
    if name == "PropertyDomain":
        arity(2)
        return PropertyDomain(iri(0), iri(1))
    if name == "PropertyRange":
        arity(2)
        return PropertyRange(iri(0), iri(1))
    if name == "PropertyCharacteristic":
        arity(2)
        try:
            return PropertyCharacteristic(iri(0), Characteristic(args[1][0]))
        except ValueError:
            raise ParseError(
                f"unknown characteristic {args[1][0]!r}",
                line,
                args[1][1],
                expected="transitive, symmetric, functional or inverse_functional",
            ) from None
    if name == "DisjointClasses":
        arity(2)
        return DisjointClasses(iri(0), iri(1))
    if name == "ClassMembership":
        arity(2)
        return ClassMembership(iri(0), iri(1))
    if name == "ObjectAssertion":
        arity(3)
        return ObjectAssertion(iri(0), iri(1), iri(2))
    if name == "DataAssertion":
        arity(3)
        return DataAssertion(iri(0), iri(1), unquote(args[2][0], line, args[2][1]))
    raise ParseError(f"unknown statement {name!r}", line, 1)


def render_statement(stmt: Statement) -> str:
    if isinstance(stmt, EntityDecl):
        return f"{stmt.kind.value}(<{stmt.iri}>)"
    if isinstance(stmt, SubClassOf):
        return f"SubClassOf(<{stmt.child}>, <{stmt.parent}>)"
    if isinstance(stmt, SubPropertyOf):
        return f"SubPropertyOf(<{stmt.child}>, <{stmt.parent}>)"
    if isinstance(stmt, ClassObjectPropertyLink):
        return (
            f"ClassObjectPropertyLink(<{stmt.cls}>, <{stmt.prop}>, "
            f"{render_value_expr(stmt.value)})"
        )
    if isinstance(stmt, ClassDataPropertyLink):
        return (
            f"ClassDataPropertyLink(<{stmt.cls}>, <{stmt.prop}>, "
            f"{render_value_expr(stmt.value)})"
        )
    if isinstance(stmt, ClassPropertyRestriction):
        value = (
            render_value_expr(stmt.value)
            if isinstance(stmt.value, ValueExpr)
            else str(stmt.value)
        )
        return (
            f"ClassPropertyRestriction(<{stmt.cls}>, <{stmt.prop}>, "
            f"{stmt.kind.value}, {value})"
        )
    if isinstance(stmt, PropertyDomain):
        return f"PropertyDomain(<{stmt.prop}>, <{stmt.cls}>)"
    if isinstance(stmt, PropertyRange):
        return f"PropertyRange(<{stmt.prop}>, <{stmt.target}>)"
    if isinstance(stmt, PropertyCharacteristic):
        return f"PropertyCharacteristic(<{stmt.prop}>, {stmt.characteristic.value})"
    if isinstance(stmt, DisjointClasses):
        return f"DisjointClasses(<{stmt.a}>, <{stmt.b}>)"
    if isinstance(stmt, ClassMembership):
        return f"ClassMembership(<{stmt.individual}>, <{stmt.cls}>)"
    if isinstance(stmt, ObjectAssertion):
        return f"ObjectAssertion(<{stmt.subject}>, <{stmt.prop}>, <{stmt.obj}>)"
    if isinstance(stmt, DataAssertion):
        return f"DataAssertion(<{stmt.subject}>, <{stmt.prop}>, {quote(stmt.literal)})"
    raise TypeError(f"not a statement: {stmt!r}")


_KIND_ORDER = (
    EntityKind.CLASS,
    EntityKind.OBJECT_PROPERTY,
    EntityKind.DATA_PROPERTY,
    EntityKind.INDIVIDUAL,
)


def serialize_ontology(onto: Ontology) -> str:
    lines: list[str] = []
    for kind in _KIND_ORDER:
        for iri in sorted(i for i, k in onto.entities.items() if k is kind):
            lines.append(f"{kind.value}(<{iri}>)")
    axiom_lines = sorted(
        (_VARIANT_RANK[type(a)], render_statement(a)) for a in onto.axioms
    )
    if lines and axiom_lines:
        lines.append("")
    lines.extend(text for _, text in axiom_lines)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_ontology(text: str, label: str = "") -> Ontology:
    """Build a snapshot through the normal update path, so closure,
    acyclicity and duplicate rules hold for whatever this returns.

    Statement order in the file is free: declarations are applied first.
    """
    decls: list[tuple[int, EntityDecl]] = []
    axioms: list[tuple[int, Axiom]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        stmt = parse_statement(s, lineno)
        if isinstance(stmt, EntityDecl):
            decls.append((lineno, stmt))
        else:
            axioms.append((lineno, stmt))
    onto = Ontology(label=label)
    for lineno, decl in decls:
        try:
            onto = onto.declare_entity(decl.kind, decl.iri)
        except OntovcsError as exc:
            raise SemanticError(lineno, exc) from exc
    for lineno, axiom in axioms:
        try:
            onto = onto.assert_axiom(axiom)
        except OntovcsError as exc:
            raise SemanticError(lineno, exc) from exc
    return onto


def render_op(op) -> str:
    """Signed one-line form used by status, preview and diff output."""
    sign = "+" if op.direction.value == "Add" else "-"
    return f"{sign} {render_statement(op.target)}"
