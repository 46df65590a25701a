"""In-process propagation of committed versions.

A registry holds ordered subscriptions; each commit publishes one event
per new version.  Delivery is exactly-once per matching subscription, in
registration order, and one failing sink never starves the rest.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

from .changes import Category
from .model import Iri

if TYPE_CHECKING:
    from .versioning import VersionContext


@dataclass(frozen=True)
class CommitEvent:
    version_id: int
    category: Category
    affected: frozenset[Iri]
    context: "VersionContext"


Sink = Callable[[CommitEvent], None]


@dataclass(frozen=True)
class Subscription:
    """A sink plus its filter; None fields match everything."""

    id: int
    sink: Sink
    category: Category | None = None
    entities: frozenset[Iri] | None = None

    def matches(self, event: CommitEvent) -> bool:
        if self.category is not None and event.category is not self.category:
            return False
        if self.entities is not None and not (self.entities & event.affected):
            return False
        return True


@dataclass
class DeliveryReport:
    delivered: list[int] = field(default_factory=list)
    failures: list[tuple[int, Exception]] = field(default_factory=list)


class FileSink:
    """Appends one event record per delivery to a text file."""

    def __init__(self, path):
        self.path = os.fspath(path)

    def __call__(self, event: CommitEvent) -> None:
        from .scriptformat import render_event_record  # late: avoids an import cycle

        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(render_event_record(event))

    def __repr__(self) -> str:
        return f"FileSink({self.path!r})"


class _StreamSink:
    def __init__(self, stream):
        self.stream = stream

    def __call__(self, event: CommitEvent) -> None:
        from .scriptformat import render_event_record

        self.stream.write(render_event_record(event))


class Registry:
    """Ordered subscription store; not safe for concurrent registration."""

    def __init__(self):
        self._subs: list[Subscription] = []
        self._next_id = 1

    def subscribe(
        self,
        sink,
        *,
        category: Category | None = None,
        entities=None,
    ) -> int:
        """Register a sink; returns its subscription id.

        `sink` may be a callable, a writable stream, or a file path.
        """
        if isinstance(sink, (str, os.PathLike)):
            sink = FileSink(sink)
        elif isinstance(sink, io.TextIOBase) or (
            not callable(sink) and hasattr(sink, "write")
        ):
            sink = _StreamSink(sink)
        if not callable(sink):
            raise TypeError(f"sink must be callable, a stream, or a path: {sink!r}")
        ents = None if entities is None else frozenset(entities)
        sub = Subscription(self._next_id, sink, category, ents)
        self._next_id += 1
        self._subs.append(sub)
        return sub.id

    def unsubscribe(self, sub_id: int) -> bool:
        for i, sub in enumerate(self._subs):
            if sub.id == sub_id:
                del self._subs[i]
                return True
        return False

    def publish(self, event: CommitEvent) -> DeliveryReport:
        """Deliver to every subscription matching at publish time.

        Sink exceptions are caught and reported; delivery always continues.
        """
        report = DeliveryReport()
        for sub in list(self._subs):
            if not sub.matches(event):
                continue
            try:
                sub.sink(event)
            except Exception as exc:  # noqa: BLE001 - isolation is the contract
                report.failures.append((sub.id, exc))
            else:
                report.delivered.append(sub.id)
        return report

    def __len__(self) -> int:
        return len(self._subs)
