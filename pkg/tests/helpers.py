"""Shared fixtures-in-code: the wine walkthrough entities and op lists."""

from __future__ import annotations

from ontovcs.changes import ChangeOp, EntityDecl, add
from ontovcs.model import (
    And,
    ClassDataPropertyLink,
    ClassMembership,
    ClassPropertyRestriction,
    EntityKind,
    Iri,
    ObjectAssertion,
    Ontology,
    Or,
    Resource,
    RestrictionKind,
    SubClassOf,
)

WINE_LABEL = "http://www.w3.org/TR/owl-guide/wine.rdf"

DESSERT_WINE = Iri("rdfs:class", "DessertWine")
STRAW_WINE = Iri("rdfs:class", "StrawWine")
HAS_COLOR = Iri("owl:DataProperty", "hasColor")
HAS_BODY = Iri("owl:DataProperty", "hasBody")
MADE_FROM_GRAPE = Iri("owl:DataProperty", "madeFromGrape")
LOCATED_IN = Iri("owl:ObjectProperty", "locatedIn")
GOLDEN = Iri("rdf:resource", "Golden")
FULL = Iri("rdf:resource", "Full")
MODERATE = Iri("rdf:resource", "Moderate")
CABERNET_SAUVIGNON = Iri("rdf:resource", "CabernetSauvignon")
CARBERNET_FRANC = Iri("rdf:resource", "Carbernetfranc")  # taken over as written
CHARDONNAY = Iri("rdf:resource", "Chardonnay")
SAUVIGNON_BLANC = Iri("rdf:resource", "SauvignonBlanc")
FRENCH_REGION = Iri("rdf:resource", "FrenchRegion")
VIN_PAILLE = Iri("rdf:resource", "VinPaillé")

AUTHOR = "Perrine PITTET"
V1_DATE = "11/05/2010"
V2_DATE = "12/05/2010"


def wine_base() -> Ontology:
    onto = Ontology(label=WINE_LABEL)
    onto = onto.declare_entity(EntityKind.CLASS, DESSERT_WINE)
    for prop in (HAS_BODY, HAS_COLOR, MADE_FROM_GRAPE):
        onto = onto.declare_entity(EntityKind.DATA_PROPERTY, prop)
    onto = onto.declare_entity(EntityKind.OBJECT_PROPERTY, LOCATED_IN)
    for ind in (
        CABERNET_SAUVIGNON,
        CARBERNET_FRANC,
        CHARDONNAY,
        FRENCH_REGION,
        FULL,
        GOLDEN,
        MODERATE,
        SAUVIGNON_BLANC,
    ):
        onto = onto.declare_entity(EntityKind.INDIVIDUAL, ind)
    return onto


GRAPE_EXPR = Or(
    And(Resource(CABERNET_SAUVIGNON), Resource(CARBERNET_FRANC)),
    And(Resource(CHARDONNAY), Resource(SAUVIGNON_BLANC)),
)

BODY_EXPR = And(Resource(FULL), Resource(MODERATE))


def schema_ops() -> list[ChangeOp]:
    """The five schema ops of the first wine version, in order."""
    return [
        add(EntityDecl(EntityKind.CLASS, STRAW_WINE)),
        add(SubClassOf(STRAW_WINE, DESSERT_WINE)),
        add(ClassDataPropertyLink(STRAW_WINE, HAS_COLOR, Resource(GOLDEN))),
        add(
            ClassPropertyRestriction(
                STRAW_WINE, HAS_BODY, RestrictionKind.VALUE, BODY_EXPR
            )
        ),
        add(
            ClassPropertyRestriction(
                STRAW_WINE, MADE_FROM_GRAPE, RestrictionKind.VALUE, GRAPE_EXPR
            )
        ),
    ]


def instance_ops() -> list[ChangeOp]:
    """The three instance ops of the second wine version, in order."""
    return [
        add(EntityDecl(EntityKind.INDIVIDUAL, VIN_PAILLE)),
        add(ClassMembership(VIN_PAILLE, STRAW_WINE)),
        add(ObjectAssertion(VIN_PAILLE, LOCATED_IN, FRENCH_REGION)),
    ]


def wine_repo():
    """Repository with both wine versions committed through the library."""
    from ontovcs.versioning import init_repository

    repo = init_repository(wine_base())
    for op in schema_ops():
        repo.stage(op)
    repo.commit(date=V1_DATE, author=AUTHOR)
    for op in instance_ops():
        repo.stage(op)
    repo.commit(date=V2_DATE, author=AUTHOR)
    return repo
