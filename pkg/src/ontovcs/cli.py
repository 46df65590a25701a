"""Command-line front end.

Thin adapter: every subcommand parses its arguments into library calls
and renders the result; no versioning logic lives here.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import store
from .changes import (
    AddClassWithDescription,
    AddIndividualWithAssertions,
    Category,
    RemoveClassPullUp,
    add,
    category,
    remove,
    EntityDecl,
)
from .consistency import Severity
from .errors import OntovcsError, ParseError
from .model import (
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
    PropertyCharacteristic,
    PropertyDomain,
    PropertyRange,
    RestrictionKind,
    SubClassOf,
    SubPropertyOf,
)
from .ontformat import parse_ontology, parse_statement, render_op, serialize_ontology
from .valueexpr import parse_value_expr
from .versioning import FindCriteria, PreviewReport, Repository, parse_date, render_date
from .scriptformat import render_version_segments


def _iri(text: str) -> Iri:
    try:
        return Iri.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _date(text: str):
    try:
        return parse_date(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unreadable date {text!r} (use DD/MM/YYYY or YYYY-MM-DD)"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontovcs",
        description="Version control for ontologies: stage typed changes, "
        "gate them through consistency checks, commit them as a replayable log.",
    )
    parser.add_argument(
        "--repo", default=".", help="repository directory (default: current)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="start a history on a base ontology")
    p.add_argument("--base", required=True, help="ontology file to start from")
    p.add_argument("--label", default=None, help="base label (default: the file path)")

    stage = sub.add_parser("stage", help="stage one change")
    ops = stage.add_subparsers(dest="op", required=True)

    def op_parser(name, help_text, *positionals):
        sp = ops.add_parser(name, help=help_text)
        for arg_name, arg_type, arg_help in positionals:
            sp.add_argument(arg_name, type=arg_type, help=arg_help)
        return sp

    op_parser("add-class", "declare a class", ("iri", _iri, "class Iri"))
    op_parser("remove-class", "retract a class (cascades)", ("iri", _iri, "class Iri"))
    op_parser("add-object-property", "declare an object property", ("iri", _iri, "property Iri"))
    op_parser("add-data-property", "declare a data property", ("iri", _iri, "property Iri"))
    op_parser("add-individual", "declare an individual", ("iri", _iri, "individual Iri"))
    op_parser("remove-individual", "retract an individual (cascades)", ("iri", _iri, "individual Iri"))
    op_parser(
        "add-subclass", "link a class under a parent",
        ("child", _iri, "subclass Iri"), ("parent", _iri, "superclass Iri"),
    )
    op_parser(
        "add-subproperty", "link a property under a parent",
        ("child", _iri, "subproperty Iri"), ("parent", _iri, "superproperty Iri"),
    )
    op_parser(
        "add-class-data-link", "describe a class through a data property",
        ("cls", _iri, "class Iri"), ("prop", _iri, "data property Iri"),
        ("value", str, "value expression"),
    )
    op_parser(
        "add-class-object-link", "describe a class through an object property",
        ("cls", _iri, "class Iri"), ("prop", _iri, "object property Iri"),
        ("value", str, "value expression"),
    )
    rp = ops.add_parser("add-restriction", help="restrict a property on a class")
    rp.add_argument("cls", type=_iri, help="class Iri")
    rp.add_argument("prop", type=_iri, help="property Iri")
    rp.add_argument("kind", choices=[k.value for k in RestrictionKind], help="restriction kind")
    rp.add_argument("value", help="value expression, or an integer bound")
    op_parser(
        "add-domain", "declare a property domain",
        ("prop", _iri, "property Iri"), ("cls", _iri, "domain class Iri"),
    )
    op_parser(
        "add-range", "declare a property range",
        ("prop", _iri, "property Iri"), ("cls", _iri, "range class Iri"),
    )
    cp = ops.add_parser("add-characteristic", help="mark a property characteristic")
    cp.add_argument("prop", type=_iri, help="property Iri")
    cp.add_argument(
        "characteristic", choices=[c.value for c in Characteristic], help="characteristic"
    )
    op_parser(
        "add-disjoint", "declare two classes disjoint",
        ("a", _iri, "class Iri"), ("b", _iri, "class Iri"),
    )
    op_parser(
        "add-member", "assert class membership",
        ("individual", _iri, "individual Iri"), ("cls", _iri, "class Iri"),
    )
    op_parser(
        "assert-object", "assert an object property value",
        ("subject", _iri, "individual Iri"), ("prop", _iri, "object property Iri"),
        ("obj", _iri, "individual Iri"),
    )
    op_parser(
        "assert-data", "assert a data property value",
        ("subject", _iri, "individual Iri"), ("prop", _iri, "data property Iri"),
        ("literal", str, "literal value"),
    )
    cd = ops.add_parser("add-class-desc", help="class plus description in one step")
    cd.add_argument("cls", type=_iri, help="class Iri")
    cd.add_argument("--parent", type=_iri, default=None, help="superclass Iri")
    cd.add_argument(
        "--axiom", action="append", default=[], metavar="STMT",
        help="describing axiom, statement syntax (repeatable)",
    )
    idp = ops.add_parser("add-individual-desc", help="individual plus assertions in one step")
    idp.add_argument("individual", type=_iri, help="individual Iri")
    idp.add_argument(
        "--member", action="append", type=_iri, default=[], metavar="CLASS",
        help="class to join (repeatable)",
    )
    idp.add_argument(
        "--axiom", action="append", default=[], metavar="STMT",
        help="assertion, statement syntax (repeatable)",
    )
    op_parser(
        "remove-class-pullup", "remove a class, re-homing subclasses and members",
        ("cls", _iri, "class Iri"),
    )

    p = sub.add_parser("unstage", help="drop one staged op")
    p.add_argument("index", type=int, help="position from `status`")

    sub.add_parser("status", help="show staged ops")

    p = sub.add_parser("preview", help="dry-run the staged ops")
    p.add_argument("--split", action="store_true", help="preview a split commit")

    p = sub.add_parser("commit", help="gate and record the staged ops")
    p.add_argument("--split", action="store_true", help="mixed staging becomes two versions")
    p.add_argument("--date", type=_date, default=None, help="version date (default: today)")
    p.add_argument("--author", default="", help="author string")
    p.add_argument("--message", default="", help="version description")

    sub.add_parser("log", help="list all versions")

    p = sub.add_parser("show", help="show one version")
    p.add_argument("id", type=int, help="version id")
    p.add_argument(
        "--format", choices=["records", "table"], default="records",
        help="records: log syntax; table: readable summary",
    )

    p = sub.add_parser("checkout", help="write a reconstructed snapshot to a file")
    p.add_argument("id", type=int, help="version id")
    p.add_argument("--out", required=True, help="output ontology file")

    p = sub.add_parser("diff", help="ops between two versions")
    p.add_argument("from_id", type=int, metavar="FROM", help="version id")
    p.add_argument("to_id", type=int, metavar="TO", help="version id")

    p = sub.add_parser("find", help="search versions by context and content")
    p.add_argument("--author", default=None)
    p.add_argument("--entity", type=_iri, default=None, help="affected entity Iri")
    p.add_argument("--kind", default=None, help="op kind, e.g. AddClass")
    p.add_argument(
        "--category", choices=[c.value for c in Category], default=None
    )
    p.add_argument("--since", type=_date, default=None)
    p.add_argument("--until", type=_date, default=None)

    p = sub.add_parser("watch", help="append commit events to a file from now on")
    p.add_argument("--sink", required=True, help="file to append event records to")
    p.add_argument(
        "--category", choices=[c.value for c in Category], default=None
    )
    p.add_argument(
        "--entity", action="append", type=_iri, default=[], metavar="IRI",
        help="only events touching this entity (repeatable)",
    )

    return parser


# -- rendering -------------------------------------------------------------------


def _render_impact(impact) -> list[str]:
    lines = []
    adds = ", ".join(
        f"{n} {k.value.lower()}(s)" for k, n in sorted(
            impact.entities_added.items(), key=lambda kv: kv[0].value
        ) if n
    )
    drops = ", ".join(
        f"{n} {k.value.lower()}(s)" for k, n in sorted(
            impact.entities_removed.items(), key=lambda kv: kv[0].value
        ) if n
    )
    lines.append(
        f"  adds: {adds or 'no entities'}, {impact.axioms_added} axiom(s)"
    )
    lines.append(
        f"  removes: {drops or 'no entities'}, {impact.axioms_removed} axiom(s)"
    )
    if impact.cascaded_losses:
        lines.append(f"  cascaded losses ({len(impact.cascaded_losses)}):")
        from .ontformat import render_statement

        lines.extend(f"    - {render_statement(a)}" for a in impact.cascaded_losses)
    for w in impact.warnings:
        lines.append(f"  warning: {w}")
    return lines


def render_preview(report: PreviewReport) -> str:
    """Readable dry-run summary: ops, split, impact, findings."""
    if not report.ops:
        return "nothing staged"
    lines = [f"staged ops ({len(report.ops)}):"]
    lines.extend(f"  [{i}] {render_op(op)}" for i, op in enumerate(report.ops))
    if len(report.split) > 1:
        lines.append("commit will split into:")
        for cs in report.split:
            lines.append(f"  {cs.category.value}: {len(cs.ops)} op(s)")
    lines.append("impact:")
    lines.extend(_render_impact(report.impact))
    if report.violations:
        lines.append("findings:")
        for severity in (Severity.ERROR, Severity.WARNING):
            lines.extend(
                f"  {v.render()}"
                for v in report.violations
                if v.severity is severity
            )
    else:
        lines.append("findings: none")
    return "\n".join(lines)


def _context_line(repo: Repository, vg) -> str:
    ctx = vg.context
    if vg.payload is None:
        return f"VersionGraph0  base=<{vg.previous.label}>"
    when = render_date(ctx.date) if ctx.date else "-"
    author = ctx.author or "-"
    desc = f"  {ctx.description}" if ctx.description else ""
    return (
        f"VersionGraph{ctx.id}  {when}  {author}  "
        f"{vg.payload.category.value}({len(vg.payload.ops)} ops){desc}"
    )


# -- handlers -------------------------------------------------------------------


def _stage_target(args):
    if args.op == "add-class":
        return add(EntityDecl(EntityKind.CLASS, args.iri))
    if args.op == "remove-class":
        return remove(EntityDecl(EntityKind.CLASS, args.iri))
    if args.op == "add-object-property":
        return add(EntityDecl(EntityKind.OBJECT_PROPERTY, args.iri))
    if args.op == "add-data-property":
        return add(EntityDecl(EntityKind.DATA_PROPERTY, args.iri))
    if args.op == "add-individual":
        return add(EntityDecl(EntityKind.INDIVIDUAL, args.iri))
    if args.op == "remove-individual":
        return remove(EntityDecl(EntityKind.INDIVIDUAL, args.iri))
    if args.op == "add-subclass":
        return add(SubClassOf(args.child, args.parent))
    if args.op == "add-subproperty":
        return add(SubPropertyOf(args.child, args.parent))
    if args.op == "add-class-data-link":
        return add(ClassDataPropertyLink(args.cls, args.prop, parse_value_expr(args.value)))
    if args.op == "add-class-object-link":
        return add(ClassObjectPropertyLink(args.cls, args.prop, parse_value_expr(args.value)))
    if args.op == "add-restriction":
        kind = RestrictionKind(args.kind)
        if kind is RestrictionKind.VALUE:
            value = parse_value_expr(args.value)
        else:
            if not args.value.isdigit():
                raise ParseError(f"integer bound expected: {args.value!r}", 1)
            value = int(args.value)
        return add(ClassPropertyRestriction(args.cls, args.prop, kind, value))
    if args.op == "add-domain":
        return add(PropertyDomain(args.prop, args.cls))
    if args.op == "add-range":
        return add(PropertyRange(args.prop, args.cls))
    if args.op == "add-characteristic":
        return add(PropertyCharacteristic(args.prop, Characteristic(args.characteristic)))
    if args.op == "add-disjoint":
        return add(DisjointClasses(args.a, args.b))
    if args.op == "add-member":
        return add(ClassMembership(args.individual, args.cls))
    if args.op == "assert-object":
        return add(ObjectAssertion(args.subject, args.prop, args.obj))
    if args.op == "assert-data":
        return add(DataAssertion(args.subject, args.prop, args.literal))
    if args.op == "add-class-desc":
        return AddClassWithDescription(
            args.cls, args.parent, tuple(_parse_axiom_arg(s) for s in args.axiom)
        )
    if args.op == "add-individual-desc":
        return AddIndividualWithAssertions(
            args.individual,
            tuple(args.member),
            tuple(_parse_axiom_arg(s) for s in args.axiom),
        )
    if args.op == "remove-class-pullup":
        return RemoveClassPullUp(args.cls)
    raise AssertionError(f"unhandled op {args.op}")


def _parse_axiom_arg(text: str):
    stmt = parse_statement(text)
    if isinstance(stmt, EntityDecl):
        raise ParseError("expected an axiom statement, not a declaration", 1)
    return stmt


def _cmd_init(args) -> int:
    root = Path(args.repo)
    if store.is_repository(root):
        print(f"error: {root} already holds a repository", file=sys.stderr)
        return 1
    base_text = Path(args.base).read_text(encoding="utf-8")
    label = args.label if args.label is not None else str(args.base)
    base = parse_ontology(base_text, label=label)
    repo = Repository(base)
    store.save_repository(repo, root)
    print(f"initialized empty history at {root} on base <{label}>")
    return 0


def _cmd_stage(args) -> int:
    with store.repo_lock(args.repo):
        repo = store.load_repository(args.repo)
        before = len(repo.staging)
        repo.stage(_stage_target(args))
        store.save_staging(repo, args.repo)
    new_ops = repo.staging[before:]
    for i, op in enumerate(new_ops, start=before):
        print(f"staged [{i}] {render_op(op)}")
    return 0


def _cmd_unstage(args) -> int:
    with store.repo_lock(args.repo):
        repo = store.load_repository(args.repo)
        dropped = repo.staging[args.index] if 0 <= args.index < len(repo.staging) else None
        repo.unstage(args.index)
        store.save_staging(repo, args.repo)
    print(f"unstaged [{args.index}] {render_op(dropped)}")
    return 0


def _cmd_status(args) -> int:
    repo = store.load_repository(args.repo)
    print(f"head: VersionGraph{repo.head_id}")
    if not repo.staging:
        print("nothing staged")
        return 0
    cats = {category(op) for op in repo.staging}
    shape = "mixed" if len(cats) > 1 else next(iter(cats)).value
    print(f"staged ops ({len(repo.staging)}, {shape}):")
    for i, op in enumerate(repo.staging):
        print(f"  [{i}] {render_op(op)}  ({category(op).value})")
    return 0


def _cmd_preview(args) -> int:
    repo = store.load_repository(args.repo)
    print(render_preview(repo.preview(split=args.split)))
    return 0


def _cmd_commit(args) -> int:
    with store.repo_lock(args.repo):
        repo = store.load_repository(args.repo)
        config = store.read_config(args.repo)
        for watcher in config.get("watchers", []):
            cat = watcher.get("category")
            entities = watcher.get("entities") or None
            repo.events.subscribe(
                watcher["sink"],
                category=Category(cat) if cat else None,
                entities=[Iri.parse(e) for e in entities] if entities else None,
            )
        created = repo.commit(
            date=args.date,
            author=args.author,
            description=args.message,
            split=args.split,
        )
        store.append_versions(repo, args.repo, len(created))
        store.save_staging(repo, args.repo)
    for vg in created:
        print(
            f"committed VersionGraph{vg.context.id} "
            f"({vg.payload.category.value}, {len(vg.payload.ops)} ops)"
        )
    return 0


def _cmd_log(args) -> int:
    repo = store.load_repository(args.repo)
    for vg in repo.chain:
        print(_context_line(repo, vg))
    return 0


def _cmd_show(args) -> int:
    repo = store.load_repository(args.repo)
    vg = repo.chain[args.id] if 0 <= args.id <= repo.head_id else None
    if vg is None:
        from .errors import UnknownVersionError

        raise UnknownVersionError(args.id)
    if args.format == "records":
        print(render_version_segments(repo.chain, repo.base)[args.id], end="")
        return 0
    print(_context_line(repo, vg))
    if vg.payload is not None:
        for op in vg.payload.ops:
            print(f"  {render_op(op)}")
        if vg.cascade_annex:
            print(f"  cascaded losses ({len(vg.cascade_annex)}):")
            from .ontformat import render_statement

            for axiom in vg.cascade_annex:
                print(f"    - {render_statement(axiom)}")
    return 0


def _cmd_checkout(args) -> int:
    repo = store.load_repository(args.repo)
    snapshot = repo.reconstruct(args.id)
    Path(args.out).write_text(serialize_ontology(snapshot), encoding="utf-8")
    print(
        f"wrote VersionGraph{args.id} snapshot to {args.out} "
        f"({len(snapshot.entities)} entities, {len(snapshot.axioms)} axioms)"
    )
    return 0


def _cmd_diff(args) -> int:
    repo = store.load_repository(args.repo)
    ops = repo.diff(args.from_id, args.to_id)
    if not ops:
        print("no changes")
        return 0
    for op in ops:
        print(render_op(op))
    return 0


def _cmd_find(args) -> int:
    repo = store.load_repository(args.repo)
    criteria = FindCriteria(
        author=args.author,
        since=args.since,
        until=args.until,
        affected_entity=args.entity,
        op_kind=args.kind,
        category=Category(args.category) if args.category else None,
    )
    matches = repo.find(criteria)
    if not matches:
        print("no versions match")
        return 0
    for vg in matches:
        print(_context_line(repo, vg))
    return 0


def _cmd_watch(args) -> int:
    with store.repo_lock(args.repo):
        store.load_repository(args.repo)  # validates the directory
        config = store.read_config(args.repo)
        watchers = config.setdefault("watchers", [])
        watchers.append(
            {
                "sink": args.sink,
                "category": args.category,
                "entities": [str(e) for e in args.entity] or None,
            }
        )
        store.write_config(args.repo, config)
    scope = args.category or "all"
    print(f"watching {scope} commits -> {args.sink}")
    return 0


_HANDLERS = {
    "init": _cmd_init,
    "stage": _cmd_stage,
    "unstage": _cmd_unstage,
    "status": _cmd_status,
    "preview": _cmd_preview,
    "commit": _cmd_commit,
    "log": _cmd_log,
    "show": _cmd_show,
    "checkout": _cmd_checkout,
    "diff": _cmd_diff,
    "find": _cmd_find,
    "watch": _cmd_watch,
}


def run(argv) -> int:
    """Parse argv and execute; returns the process exit status.

    0 on success, 1 for domain failures (violations, missing files, bad
    references), 2 for usage errors.  Never lets a stack trace escape.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except OntovcsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        from .errors import BlockedByViolationsError

        if isinstance(exc, BlockedByViolationsError):
            for v in exc.violations:
                print(f"  {v.render()}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
