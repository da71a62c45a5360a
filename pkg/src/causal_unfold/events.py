"""Event identifiers and their deterministic ordering."""

from typing import Any, NamedTuple, Optional


class PairEvent(NamedTuple):
    """An event of a product or pullback: a pair of optional components.

    ``None`` marks an absent component; it is never an event name.
    """

    left: Optional[Any]
    right: Optional[Any]

    def __str__(self):
        left = "*" if self.left is None else str(self.left)
        right = "*" if self.right is None else str(self.right)
        return f"({left},{right})"


def event_key(e):
    """Total sort key over every event type the library produces."""
    if isinstance(e, PairEvent):
        return (3, event_key(e.left), event_key(e.right))
    if e is None:
        return (0,)
    if isinstance(e, str):
        return (1, e)
    if isinstance(e, tuple):
        return (4, tuple(event_key(x) for x in e))
    if isinstance(e, frozenset):
        return (5, tuple(sorted(event_key(x) for x in e)))
    return (2, str(e))


def sort_events(events):
    return tuple(sorted(events, key=event_key))


def sort_sets(sets):
    """Deterministic order on a collection of event sets: by size, then members."""
    return tuple(
        sorted(
            (frozenset(s) for s in sets),
            key=lambda s: (len(s), tuple(event_key(x) for x in sort_events(s))),
        )
    )


def show(e):
    return str(e)
