"""Version control for ontologies.

Stage typed change operations, gate them through structural consistency
checks and impact analysis, commit them as a chained, replayable version
log, and propagate each commit to subscribers.
"""

from .changes import (
    AddClassWithDescription,
    AddIndividualWithAssertions,
    Category,
    ChangeOp,
    ComposedOp,
    Direction,
    EntityDecl,
    ImpactReport,
    RemoveClassPullUp,
    add,
    affected_entities,
    apply,
    category,
    decompose,
    impact,
    invert,
    op_kind,
    remove,
)
from .consistency import Severity, Violation, check_changes, check_ontology
from .errors import OntovcsError
from .events import CommitEvent, DeliveryReport, FileSink, Registry, Subscription
from .model import (
    And,
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
from .ontformat import parse_ontology, parse_statement, render_statement, serialize_ontology
from .scriptformat import parse_version_log, serialize_version_log
from .store import load_repository, save_repository
from .valueexpr import parse_value_expr, render_value_expr
from .versioning import (
    BaseRef,
    ChangeSet,
    FindCriteria,
    PreviewReport,
    Repository,
    VersionContext,
    VersionGraph,
    VersionRef,
    init_repository,
)

__version__ = "0.1.0"

__all__ = [
    "AddClassWithDescription",
    "AddIndividualWithAssertions",
    "And",
    "Axiom",
    "BaseRef",
    "Category",
    "ChangeOp",
    "ChangeSet",
    "Characteristic",
    "ClassDataPropertyLink",
    "ClassMembership",
    "ClassObjectPropertyLink",
    "ClassPropertyRestriction",
    "CommitEvent",
    "ComposedOp",
    "DataAssertion",
    "DeliveryReport",
    "Direction",
    "DisjointClasses",
    "EntityDecl",
    "EntityKind",
    "FileSink",
    "FindCriteria",
    "ImpactReport",
    "Iri",
    "ObjectAssertion",
    "Ontology",
    "OntovcsError",
    "Or",
    "PreviewReport",
    "PropertyCharacteristic",
    "PropertyDomain",
    "PropertyRange",
    "Registry",
    "RemoveClassPullUp",
    "Repository",
    "Resource",
    "RestrictionKind",
    "Severity",
    "SubClassOf",
    "SubPropertyOf",
    "Subscription",
    "ValueExpr",
    "VersionContext",
    "VersionGraph",
    "VersionRef",
    "Violation",
    "add",
    "affected_entities",
    "apply",
    "category",
    "check_changes",
    "check_ontology",
    "decompose",
    "impact",
    "init_repository",
    "invert",
    "load_repository",
    "op_kind",
    "parse_ontology",
    "parse_statement",
    "parse_value_expr",
    "parse_version_log",
    "remove",
    "render_statement",
    "render_value_expr",
    "save_repository",
    "serialize_ontology",
    "serialize_version_log",
]
