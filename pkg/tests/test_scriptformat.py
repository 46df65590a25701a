"""Record-format serialization of version logs and staging files."""

from __future__ import annotations

import random

import pytest

from generators import gen_repo
from helpers import (
    AUTHOR,
    DESSERT_WINE,
    GOLDEN,
    HAS_BODY,
    LOCATED_IN,
    STRAW_WINE,
    V1_DATE,
    VIN_PAILLE,
    WINE_LABEL,
    instance_ops,
    schema_ops,
    wine_base,
)
from ontovcs.changes import EntityDecl, add, remove
from ontovcs.errors import (
    ChainError,
    InvalidChainError,
    ParseError,
    UnresolvedReferenceError,
)
from ontovcs.model import (
    ClassMembership,
    ClassPropertyRestriction,
    EntityKind,
    Iri,
    ObjectAssertion,
    Resource,
    RestrictionKind,
    SubClassOf,
)
from ontovcs.scriptformat import (
    Pair,
    ScriptRecord,
    ScriptValue,
    parse_records,
    parse_staging,
    parse_version_log,
    render_record,
    render_records,
    serialize_staging,
    serialize_version_log,
)
from ontovcs.versioning import (
    BaseRef,
    Category,
    ChangeSet,
    VersionContext,
    VersionGraph,
    VersionRef,
    init_repository,
)


class TestRecordReader:
    def test_basic_record(self):
        text = "<vg:X#X1>\n  p:hasThing <a#Y>;\n"
        records = parse_records(text)
        assert records == [
            ScriptRecord(
                "vg:X#X1", (Pair("p:hasThing", ScriptValue("ref", "a#Y")),)
            )
        ]

    def test_indentation_is_free(self):
        flat = "<vg:X#X1>\np:hasThing <a#Y>;\n"
        deep = "<vg:X#X1>\n        p:hasThing <a#Y>;\n"
        assert parse_records(flat) == parse_records(deep)

    def test_semicolon_is_optional(self):
        with_semi = parse_records("<vg:X#X1>\n  p:hasName \"n\";\n")
        without = parse_records("<vg:X#X1>\n  p:hasName \"n\"\n")
        assert with_semi == without

    def test_pair_continues_until_parens_balance(self):
        text = (
            "<vg:X#X1>\n"
            "  p:value (<a#P> and\n"
            "     <a#Q>) or <a#R>\n"
            "  p:next <a#Z>;\n"
        )
        records = parse_records(text)
        pairs = records[0].pairs
        assert pairs[0].value == ScriptValue("raw", "(<a#P> and <a#Q>) or <a#R>")
        assert pairs[1].predicate == "p:next"

    def test_comment_lines_and_blanks_skipped(self):
        text = "# heading\n\n<vg:X#X1>\n  # note\n  p:hasName \"n\";\n"
        records = parse_records(text)
        assert len(records) == 1

    def test_multiple_records_split_on_subjects(self):
        text = "<vg:A#A1>\n  p:x <a#Y>;\n<vg:B#B1>\n  p:y <a#Z>;\n"
        records = parse_records(text)
        assert [r.subject for r in records] == ["vg:A#A1", "vg:B#B1"]

    def test_pair_before_any_subject_rejected(self):
        with pytest.raises(ParseError):
            parse_records("p:orphan <a#Y>;\n")

    def test_object_may_start_on_the_next_line(self):
        text = "<vg:X#X1>\n  p:value\n    <a#Y>;\n"
        records = parse_records(text)
        assert records[0].pairs == (Pair("p:value", ScriptValue("ref", "a#Y")),)

    def test_predicate_dangling_at_end_rejected(self):
        with pytest.raises(ParseError) as info:
            parse_records("<vg:X#X1>\n  p:next <a#Y>;\n  p:empty\n")
        assert "no object" in str(info.value)

    def test_render_is_canonical_and_reparses(self):
        record = ScriptRecord(
            "vg:X#X1",
            (
                Pair("p:hasName", ScriptValue("str", 'with "quote"')),
                Pair("p:hasRef", ScriptValue("ref", "a#Y")),
                Pair("p:hasExpr", ScriptValue("raw", "<a#P> and <a#Q>")),
            ),
        )
        text = render_record(record)
        assert text.endswith(";\n")
        assert all(
            line.startswith("  ") for line in text.splitlines()[1:]
        )
        assert parse_records(text) == [record]

    def test_records_joined_with_blank_line(self):
        a = ScriptRecord("vg:A#A1", (Pair("p:x", ScriptValue("ref", "a#Y")),))
        b = ScriptRecord("vg:B#B1", (Pair("p:y", ScriptValue("ref", "a#Z")),))
        text = render_records([a, b])
        assert "\n\n" in text
        assert parse_records(text) == [a, b]


class TestVersionLogShape:
    def test_initial_record_is_bare_base_link(self, repo):
        text = serialize_version_log(repo.chain, repo.base)
        first, rest = text.split("\n\n", 1)
        assert first == (
            "<vg:VersionGraph#VersionGraph0>\n"
            f"  p:hasPreviousVersionGraph <{WINE_LABEL}>;"
        )
        assert "# VersionGraph1 description" in rest

    def test_version_headers_and_change_set_names(self, repo):
        text = serialize_version_log(repo.chain, repo.base)
        assert "# VersionGraph1 description" in text
        assert "# AssociatedSchemaVersionGraph1 description" in text
        assert "# Description of SchemaOperation used" in text
        assert "# VersionGraph2 description" in text
        assert "# AssociatedInstanceVersionGraph1 description" in text
        assert "# Description of InstanceOperation used" in text

    def test_class_declarations_are_direct_objects(self, repo):
        text = serialize_version_log(repo.chain, repo.base)
        assert "p:hasAddClass <rdfs:class#StrawWine>;" in text
        # individual declarations go through a record instead
        assert "p:hasAddIndividual <vg:AddIndividual#AddIndividual1>;" in text

    def test_instance_record_types_carry_direction(self, repo):
        text = serialize_version_log(repo.chain, repo.base)
        assert "<vg:AddMemberClass#AddMemberClass1>" in text
        assert "<vg:AddObjectPropertyAssertion#AddObjectPropertyAssertion1>" in text
        # schema record types do not
        assert "<vg:ClassHierarchyLink#ClassHierarchyLink1>" in text

    def test_record_numbers_count_per_kind_across_file(self):
        repo = init_repository(wine_base())
        repo.stage(add(EntityDecl(EntityKind.CLASS, STRAW_WINE)))
        repo.stage(add(SubClassOf(STRAW_WINE, DESSERT_WINE)))
        repo.commit(date=V1_DATE, author=AUTHOR)
        ice = Iri("rdfs:class", "IceWine")
        repo.stage(add(EntityDecl(EntityKind.CLASS, ice)))
        repo.stage(add(SubClassOf(ice, STRAW_WINE)))
        repo.commit(date="13/05/2010", author=AUTHOR)
        text = serialize_version_log(repo.chain, repo.base)
        assert "<vg:ClassHierarchyLink#ClassHierarchyLink1>" in text
        assert "<vg:ClassHierarchyLink#ClassHierarchyLink2>" in text
        assert "SchemaVersionGraph1" in text
        assert "SchemaVersionGraph2" in text

    def test_restriction_sort_resolved_from_declarations(self):
        repo = init_repository(wine_base())
        repo.stage(add(EntityDecl(EntityKind.CLASS, STRAW_WINE)))
        repo.stage(
            add(
                ClassPropertyRestriction(
                    STRAW_WINE, HAS_BODY, RestrictionKind.VALUE, Resource(GOLDEN)
                )
            )
        )
        repo.stage(
            add(
                ClassPropertyRestriction(
                    STRAW_WINE, LOCATED_IN, RestrictionKind.MIN, 1
                )
            )
        )
        repo.commit(date=V1_DATE)
        text = serialize_version_log(repo.chain, repo.base)
        assert "vg:ClassDataPropertyCardinality#ClassDataPropertyCardinality1" in text
        assert (
            "vg:ClassObjectPropertyCardinality#ClassObjectPropertyCardinality1" in text
        )
        assert "p:dataProperty <owl:DataProperty#hasBody>;" in text
        assert "p:objectProperty <owl:ObjectProperty#locatedIn>;" in text

    def test_restriction_on_property_declared_earlier_in_log(self):
        prop = Iri("owl:ObjectProperty", "growsOn")
        repo = init_repository(wine_base())
        repo.stage(add(EntityDecl(EntityKind.OBJECT_PROPERTY, prop)))
        repo.commit(date=V1_DATE)
        repo.stage(
            add(ClassPropertyRestriction(DESSERT_WINE, prop, RestrictionKind.MAX, 2))
        )
        repo.commit(date="13/05/2010")
        text = serialize_version_log(repo.chain, repo.base)
        assert "ClassObjectPropertyCardinality1" in text

    def test_cascade_annex_serialized_as_quoted_statements(self, base):
        repo = init_repository(
            base.assert_axiom(ClassMembership(GOLDEN, DESSERT_WINE))
        )
        repo.stage(remove(EntityDecl(EntityKind.INDIVIDUAL, GOLDEN)))
        repo.commit(date=V1_DATE)
        text = serialize_version_log(repo.chain, repo.base)
        assert (
            'p:hasCascadedLoss "ClassMembership(<rdf:resource#Golden>, '
            '<rdfs:class#DessertWine>)";'
        ) in text

    def test_optional_context_fields_omitted(self, base):
        repo = init_repository(base)
        repo.stage(add(EntityDecl(EntityKind.CLASS, STRAW_WINE)))
        repo.commit(date=V1_DATE)  # no author, no description
        text = serialize_version_log(repo.chain, repo.base)
        assert "p:hasAuthor" not in text
        assert "p:hasDescription" not in text

    def test_prefix_stability_under_growth(self, base):
        repo = init_repository(base)
        texts = [serialize_version_log(repo.chain, repo.base)]
        repo.stage(add(EntityDecl(EntityKind.CLASS, STRAW_WINE)))
        repo.commit(date=V1_DATE)
        texts.append(serialize_version_log(repo.chain, repo.base))
        repo.stage(add(SubClassOf(STRAW_WINE, DESSERT_WINE)))
        repo.commit(date="13/05/2010")
        texts.append(serialize_version_log(repo.chain, repo.base))
        for shorter, longer in zip(texts, texts[1:]):
            assert longer.startswith(shorter)


class TestChainValidation:
    def test_empty_chain_rejected(self):
        with pytest.raises(InvalidChainError):
            serialize_version_log([])

    def test_out_of_order_ids_rejected(self, repo):
        chain = [repo.chain[0], repo.chain[2]]
        with pytest.raises(InvalidChainError):
            serialize_version_log(chain)

    def test_initial_record_must_link_base(self, repo):
        bad = VersionGraph(
            context=VersionContext(id=0, date=None),
            previous=VersionRef(0),
        )
        with pytest.raises(InvalidChainError):
            serialize_version_log([bad])

    def test_later_record_needs_payload(self):
        chain = [
            VersionGraph(
                context=VersionContext(id=0, date=None), previous=BaseRef("x#y")
            ),
            VersionGraph(
                context=VersionContext(id=1, date=None), previous=VersionRef(0)
            ),
        ]
        with pytest.raises(InvalidChainError):
            serialize_version_log(chain)

    def test_change_set_is_single_category(self):
        with pytest.raises(ValueError):
            ChangeSet(
                Category.SCHEMA,
                (
                    add(EntityDecl(EntityKind.CLASS, STRAW_WINE)),
                    add(EntityDecl(EntityKind.INDIVIDUAL, VIN_PAILLE)),
                ),
            )


class TestVersionLogParsing:
    def test_round_trip_of_walkthrough_chain(self, repo):
        text = serialize_version_log(repo.chain, repo.base)
        assert parse_version_log(text) == repo.chain

    def test_round_trip_of_random_chains(self):
        rng = random.Random(67)
        for _ in range(25):
            repo = gen_repo(rng)
            text = serialize_version_log(repo.chain, repo.base)
            assert parse_version_log(text) == repo.chain

    def test_tolerant_input_normalizes(self):
        text = (
            "<vg:VersionGraph#VersionGraph0>\n"
            "p:hasPreviousVersionGraph <x#base>\n"
            "\n"
            "<vg:VersionGraph#VersionGraph1>\n"
            "      p:hasPreviousVersionGraph <vg:VersionGraph#VersionGraph0>\n"
            "  p:hasDate \"11/05/2010\";\n"
            " p:hasSchemaVersionGraph <vg:SchemaVersionGraph#SchemaVersionGraph1>\n"
            "<vg:SchemaVersionGraph#SchemaVersionGraph1>\n"
            "  p:hasAddClass <rdfs:class#StrawWine>\n"
        )
        chain = parse_version_log(text)
        assert len(chain) == 2
        assert chain[1].payload.ops == (
            add(EntityDecl(EntityKind.CLASS, STRAW_WINE)),
        )

    def test_missing_version_records(self):
        with pytest.raises(ChainError):
            parse_version_log("<vg:Other#Other1>\n  p:x <a#Y>;\n")

    def test_gap_in_ids_rejected(self, repo):
        text = serialize_version_log(repo.chain, repo.base)
        # drop the block whose subject line is the VersionGraph1 record
        blocks = [
            b
            for b in text.split("\n\n")
            if all(line != "<vg:VersionGraph#VersionGraph1>" for line in b.splitlines())
        ]
        with pytest.raises(ChainError):
            parse_version_log("\n\n".join(blocks))

    def test_wrong_previous_link_rejected(self, repo):
        text = serialize_version_log(repo.chain, repo.base)
        broken = text.replace(
            "<vg:VersionGraph#VersionGraph2>\n"
            "  p:hasPreviousVersionGraph <vg:VersionGraph#VersionGraph1>;",
            "<vg:VersionGraph#VersionGraph2>\n"
            "  p:hasPreviousVersionGraph <vg:VersionGraph#VersionGraph0>;",
        )
        assert broken != text
        with pytest.raises(ChainError) as info:
            parse_version_log(broken)
        assert "branching or gaps" in str(info.value)

    def test_initial_record_rejects_extra_payload(self):
        text = (
            "<vg:VersionGraph#VersionGraph0>\n"
            "  p:hasPreviousVersionGraph <x#base>;\n"
            "  p:hasDate \"11/05/2010\";\n"
        )
        with pytest.raises(ChainError):
            parse_version_log(text)

    def test_version_needs_exactly_one_change_set_link(self):
        head = (
            "<vg:VersionGraph#VersionGraph0>\n"
            "  p:hasPreviousVersionGraph <x#base>;\n\n"
            "<vg:VersionGraph#VersionGraph1>\n"
            "  p:hasPreviousVersionGraph <vg:VersionGraph#VersionGraph0>;\n"
        )
        with pytest.raises(ChainError):
            parse_version_log(head)
        both = head + (
            "  p:hasSchemaVersionGraph <vg:SchemaVersionGraph#SchemaVersionGraph1>;\n"
            "  p:hasInstanceVersionGraph <vg:InstanceVersionGraph#InstanceVersionGraph1>;\n"
        )
        with pytest.raises(ChainError):
            parse_version_log(both)

    def test_mixed_ops_in_one_change_set_rejected(self):
        text = (
            "<vg:VersionGraph#VersionGraph0>\n"
            "  p:hasPreviousVersionGraph <x#base>;\n\n"
            "<vg:VersionGraph#VersionGraph1>\n"
            "  p:hasPreviousVersionGraph <vg:VersionGraph#VersionGraph0>;\n"
            "  p:hasSchemaVersionGraph <vg:SchemaVersionGraph#SchemaVersionGraph1>;\n\n"
            "<vg:SchemaVersionGraph#SchemaVersionGraph1>\n"
            "  p:hasAddClass <rdfs:class#StrawWine>;\n"
            "  p:hasAddIndividual <rdf:resource#VinPaille>;\n"
        )
        with pytest.raises(ChainError):
            parse_version_log(text)

    def test_unresolved_change_record_reference(self):
        text = (
            "<vg:VersionGraph#VersionGraph0>\n"
            "  p:hasPreviousVersionGraph <x#base>;\n\n"
            "<vg:VersionGraph#VersionGraph1>\n"
            "  p:hasPreviousVersionGraph <vg:VersionGraph#VersionGraph0>;\n"
            "  p:hasSchemaVersionGraph <vg:SchemaVersionGraph#SchemaVersionGraph1>;\n"
        )
        with pytest.raises(UnresolvedReferenceError):
            parse_version_log(text)

    def test_duplicate_subject_rejected(self):
        text = (
            "<vg:VersionGraph#VersionGraph0>\n"
            "  p:hasPreviousVersionGraph <x#base>;\n\n"
            "<vg:VersionGraph#VersionGraph0>\n"
            "  p:hasPreviousVersionGraph <x#base>;\n"
        )
        with pytest.raises(ParseError):
            parse_version_log(text)

    def test_unknown_change_predicate_rejected(self):
        text = (
            "<vg:VersionGraph#VersionGraph0>\n"
            "  p:hasPreviousVersionGraph <x#base>;\n\n"
            "<vg:VersionGraph#VersionGraph1>\n"
            "  p:hasPreviousVersionGraph <vg:VersionGraph#VersionGraph0>;\n"
            "  p:hasSchemaVersionGraph <vg:SchemaVersionGraph#SchemaVersionGraph1>;\n\n"
            "<vg:SchemaVersionGraph#SchemaVersionGraph1>\n"
            "  p:wrongShape <rdfs:class#StrawWine>;\n"
        )
        with pytest.raises(ParseError):
            parse_version_log(text)

    def test_cascade_annex_round_trips(self, base):
        repo = init_repository(
            base.assert_axiom(ObjectAssertion(GOLDEN, LOCATED_IN, GOLDEN))
        )
        repo.stage(remove(EntityDecl(EntityKind.INDIVIDUAL, GOLDEN)))
        repo.commit(date=V1_DATE)
        text = serialize_version_log(repo.chain, repo.base)
        parsed = parse_version_log(text)
        assert parsed[1].cascade_annex == repo.chain[1].cascade_annex

    def test_cascade_annex_must_hold_axioms(self):
        text = (
            "<vg:VersionGraph#VersionGraph0>\n"
            "  p:hasPreviousVersionGraph <x#base>;\n\n"
            "<vg:VersionGraph#VersionGraph1>\n"
            "  p:hasPreviousVersionGraph <vg:VersionGraph#VersionGraph0>;\n"
            "  p:hasSchemaVersionGraph <vg:SchemaVersionGraph#SchemaVersionGraph1>;\n\n"
            "<vg:SchemaVersionGraph#SchemaVersionGraph1>\n"
            "  p:hasAddClass <rdfs:class#StrawWine>;\n"
            "  p:hasCascadedLoss \"Class(<rdfs:class#Gone>)\";\n"
        )
        with pytest.raises(ParseError):
            parse_version_log(text)


class TestStagingFile:
    def test_empty_staging_is_empty_text(self):
        assert serialize_staging([]) == ""
        assert parse_staging("") == []

    def test_round_trip_preserves_order(self, base):
        ops = schema_ops() + []
        text = serialize_staging(ops, base)
        assert parse_staging(text) == ops

    def test_instance_ops_round_trip(self, base):
        working = base.declare_entity(EntityKind.CLASS, STRAW_WINE)
        ops = instance_ops()
        text = serialize_staging(ops, working)
        assert parse_staging(text) == ops

    def test_missing_staging_record_rejected(self):
        with pytest.raises(ParseError):
            parse_staging("<vg:Other#Other1>\n  p:x <a#Y>;\n")
