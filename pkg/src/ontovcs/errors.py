"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class OntovcsError(Exception):
    """Base class for all package-specific failures."""


# -- snapshot-level failures -------------------------------------------------

class AlreadyDeclaredError(OntovcsError):
    """An Iri is already present in the entity map (any kind)."""

    def __init__(self, iri, existing_kind):
        self.iri = iri
        self.existing_kind = existing_kind
        super().__init__(f"<{iri}> is already declared as {existing_kind.value}")


class DanglingReferenceError(OntovcsError):
    """An axiom slot or query names an Iri that is absent or mis-kinded."""

    def __init__(self, iri, detail: str = ""):
        self.iri = iri
        msg = f"<{iri}> is not declared with the kind this position requires"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class DuplicateAxiomError(OntovcsError):
    def __init__(self, axiom):
        self.axiom = axiom
        super().__init__(f"axiom already asserted: {axiom!r}")


class HierarchyCycleError(OntovcsError):
    """Asserting this subsumption link would close a cycle; path names it."""

    def __init__(self, path):
        self.path = tuple(path)
        chain = " -> ".join(f"<{p}>" for p in self.path)
        super().__init__(f"hierarchy cycle: {chain}")


class NotPresentError(OntovcsError):
    def __init__(self, target):
        self.target = target
        super().__init__(f"not present in this snapshot: {target!r}")


# -- change-op failures ------------------------------------------------------

class ChangeError(OntovcsError):
    """Wraps a snapshot failure with the op (and position) that caused it."""

    def __init__(self, op, cause: Exception, index: int | None = None):
        self.op = op
        self.cause = cause
        self.index = index
        where = "" if index is None else f" at position {index}"
        super().__init__(f"cannot apply {op!r}{where}: {cause}")


class NotInvertibleError(OntovcsError):
    def __init__(self, op, reason: str):
        self.op = op
        super().__init__(f"{op!r} has no inverse: {reason}")


class DecompositionError(OntovcsError):
    """A composed op's embedded parts do not reference its head entity."""


class AmbiguousParentError(DecompositionError):
    def __init__(self, cls, parents):
        self.cls = cls
        self.parents = tuple(parents)
        shown = ", ".join(f"<{p}>" for p in self.parents) or "none"
        super().__init__(
            f"pull-up removal of <{cls}> needs exactly one direct parent, found: {shown}"
        )


# -- repository failures -----------------------------------------------------

class InconsistentBaseError(OntovcsError):
    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__(
            f"base ontology fails consistency checks ({len(self.violations)} finding(s))"
        )


class OutOfRangeError(OntovcsError):
    def __init__(self, index: int, size: int):
        self.index = index
        self.size = size
        super().__init__(f"index {index} out of range for {size} staged op(s)")


class EmptyStagingError(OntovcsError):
    def __init__(self):
        super().__init__("nothing staged; stage at least one change before committing")


class MixedChangeSetError(OntovcsError):
    def __init__(self):
        super().__init__(
            "staged ops mix schema and instance changes; "
            "commit with split=True to record them as two consecutive versions"
        )


class BlockedByViolationsError(OntovcsError):
    def __init__(self, violations):
        self.violations = tuple(violations)
        errors = [v for v in self.violations if v.severity.name == "ERROR"]
        super().__init__(f"commit blocked by {len(errors)} consistency error(s)")


class UnknownVersionError(OntovcsError):
    def __init__(self, version_id):
        self.version_id = version_id
        super().__init__(f"no version with id {version_id}")


class ReentrantMutationError(OntovcsError):
    def __init__(self):
        super().__init__("repository mutation attempted from inside event delivery")


# -- text-format and storage failures ----------------------------------------

class ParseError(OntovcsError):
    """Syntax failure; line and column are 1-based positions in the input."""

    def __init__(self, message: str, line: int, column: int = 1, expected: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        tail = f", expected {expected}" if expected else ""
        super().__init__(f"line {line}, column {column}: {message}{tail}")


class SemanticError(OntovcsError):
    """A well-formed statement that the snapshot rejects; wraps the cause."""

    def __init__(self, line: int, cause: Exception):
        self.line = line
        self.cause = cause
        super().__init__(f"line {line}: {cause}")


class UnresolvedReferenceError(OntovcsError):
    def __init__(self, subject: str, line: int):
        self.subject = subject
        self.line = line
        super().__init__(f"line {line}: reference to missing record {subject}")


class ChainError(OntovcsError):
    """Parsed version records do not form a single linear 0..N chain."""


class InvalidChainError(ChainError):
    """In-memory chain handed to the serializer breaks the chain invariants."""


class MissingFileError(OntovcsError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"repository file missing: {path}")


class ReplayMismatchError(OntovcsError):
    def __init__(self, version_id: int, op, cause: Exception):
        self.version_id = version_id
        self.op = op
        self.cause = cause
        super().__init__(
            f"log does not replay over the stored base: version {version_id}, "
            f"op {op!r}: {cause}"
        )


class RepositoryLockedError(OntovcsError):
    def __init__(self, path):
        self.path = path
        super().__init__(
            f"another process holds the repository lock ({path}); "
            "remove the file if that process is gone"
        )
