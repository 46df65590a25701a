"""On-disk repository layout.

A repository directory holds:

    base.ont     the starting snapshot, statement-per-line
    versions.vg  the committed chain, append-only record log
    staging.vg   staged ops awaiting commit (absent or empty when clean)
    config.json  tooling state (watch subscriptions)

Writes are atomic per file (temp file plus rename); versions.vg is only
ever appended to after init, never rewritten.
"""

from __future__ import annotations

import json
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path

from .changes import apply_all
from .errors import (
    ChangeError,
    MissingFileError,
    ReplayMismatchError,
    RepositoryLockedError,
)
from .ontformat import parse_ontology, serialize_ontology
from .scriptformat import (
    parse_staging,
    parse_version_log,
    render_version_segments,
    serialize_staging,
    serialize_version_log,
)
from .versioning import Repository

BASE_FILE = "base.ont"
LOG_FILE = "versions.vg"
STAGING_FILE = "staging.vg"
CONFIG_FILE = "config.json"
LOCK_FILE = ".lock"


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def is_repository(path) -> bool:
    return (Path(path) / LOG_FILE).is_file()


def load_repository(path) -> Repository:
    """Read a repository directory back into a live Repository.

    The chain is replayed over the base as part of loading; a log that no
    longer applies raises ReplayMismatch naming the first offending op.
    """
    root = Path(path)
    base_path = root / BASE_FILE
    log_path = root / LOG_FILE
    if not base_path.is_file():
        raise MissingFileError(base_path)
    if not log_path.is_file():
        raise MissingFileError(log_path)
    base = parse_ontology(base_path.read_text(encoding="utf-8"))
    chain = parse_version_log(log_path.read_text(encoding="utf-8"))
    base = base.relabel(chain[0].previous.label)

    head = base
    for vg in chain[1:]:
        try:
            head, _ = apply_all(vg.payload.ops, head)
        except ChangeError as err:
            raise ReplayMismatchError(vg.context.id, err.op, err.cause) from err

    staging_path = root / STAGING_FILE
    staging = []
    if staging_path.is_file():
        staging = parse_staging(staging_path.read_text(encoding="utf-8"))
    return Repository._assemble(base, chain, staging)


def save_repository(repo: Repository, path) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    _atomic_write(root / BASE_FILE, serialize_ontology(repo.base))
    _atomic_write(root / LOG_FILE, serialize_version_log(repo.chain, repo.base))
    _atomic_write(root / STAGING_FILE, serialize_staging(repo.staging, repo.head))


def append_versions(repo: Repository, path, new_count: int) -> None:
    """Extend versions.vg for the newest `new_count` records.

    When the file on disk is the canonical serialization of the old chain,
    the new bytes are a pure append; a non-canonical (hand-edited) file is
    still only appended to, never rewritten.
    """
    root = Path(path)
    log_path = root / LOG_FILE
    segments = render_version_segments(repo.chain, repo.base)
    full = "\n".join(segments)
    existing = log_path.read_text(encoding="utf-8") if log_path.is_file() else ""
    if full.startswith(existing):
        delta = full[len(existing):]
    else:
        delta = "\n" + "\n".join(segments[-new_count:])
    with open(log_path, "a", encoding="utf-8") as fh:
        fh.write(delta)


def save_staging(repo: Repository, path) -> None:
    root = Path(path)
    _atomic_write(root / STAGING_FILE, serialize_staging(repo.staging, repo.head))


def read_config(path) -> dict:
    cfg_path = Path(path) / CONFIG_FILE
    if not cfg_path.is_file():
        return {}
    return json.loads(cfg_path.read_text(encoding="utf-8"))


def write_config(path, config: dict) -> None:
    _atomic_write(Path(path) / CONFIG_FILE, json.dumps(config, indent=2) + "\n")


@contextmanager
def repo_lock(path):
    """Exclusive advisory lock for mutating commands; one writer at a time."""
    lock_path = Path(path) / LOCK_FILE
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RepositoryLockedError(lock_path) from None
    try:
        os.write(fd, str(os.getpid()).encode("ascii"))
        os.close(fd)
        yield
    finally:
        try:
            os.unlink(lock_path)
        except OSError:
            pass
