"""Event structures, equivalence families and their maps.

Four kinds of object live here:

* :class:`PrimeES` - events, a causal partial order and a consistency relation;
* :class:`Ese` - a prime event structure with an equivalence on its events;
* :class:`GeneralES` - events, consistency and an enabling relation;
* :class:`EquivFamily` - an explicit family of configurations with an
  equivalence on its underlying events.

Consistency is stored as its maximal generating sets and enabling as a set of
generating pairs ``(X, e)``; both are closed on demand (downwards for
consistency, upwards within consistent sets for enabling).

Everything is immutable. Internally sets of events are handled as bitmasks
over a structure's sorted event tuple.
"""

import dataclasses
import enum
import functools
import types
from collections import defaultdict, deque
from typing import Any, Mapping

from . import kernels
from .caps import get_caps
from .errors import ConfigExplosion, KindMismatch
from .events import event_key, show, sort_events, sort_sets


@dataclasses.dataclass(frozen=True)
class Violation:
    """A failed axiom together with the events or sets witnessing it."""

    axiom: str
    witness: tuple
    detail: str = ""

    def __str__(self):
        parts = ", ".join(_fmt(w) for w in self.witness)
        text = f"{self.axiom}: {parts}"
        if self.detail:
            text += f" ({self.detail})"
        return text


def _fmt(w):
    if isinstance(w, (set, frozenset)):
        return "{" + ",".join(show(e) for e in sort_events(w)) + "}"
    if isinstance(w, tuple) and not hasattr(w, "_fields"):
        return "(" + ", ".join(_fmt(x) for x in w) + ")"
    return show(w)


def maximal_sets(sets):
    """The inclusion-maximal members of ``sets``, deduplicated and sorted."""
    uniq = set(frozenset(s) for s in sets)
    out = [s for s in uniq if not any(s < t for t in uniq)]
    return sort_sets(out)


def transitive_below(events, pairs):
    """Strict-predecessor sets of the transitive closure of ``pairs``.

    Cycles are kept (an event may end up below itself) so that validation can
    report them.
    """
    direct = defaultdict(set)
    for a, b in pairs:
        direct[b].add(a)
    below = {}
    for e in events:
        seen = set()
        stack = list(direct[e])
        while stack:
            a = stack.pop()
            if a in seen:
                continue
            seen.add(a)
            stack.extend(direct[a])
        below[e] = frozenset(seen)
    return below


def _partition(events, classes):
    """Complete ``classes`` with singletons for uncovered events."""
    out = [frozenset(c) for c in classes if len(c) > 0]
    covered = set().union(*out) if out else set()
    out.extend(frozenset([e]) for e in events if e not in covered)
    return sort_sets(set(out))


class _EquivMixin:
    """Equivalence lookups shared by :class:`Ese` and :class:`EquivFamily`."""

    @functools.cached_property
    def class_of(self):
        table = {}
        for c in self.equiv:
            for e in c:
                table.setdefault(e, c)
        return table

    def same(self, a, b):
        if a == b:
            return True
        ca = self.class_of.get(a)
        return ca is not None and b in ca

    def classes_of(self, xs):
        """The set of equivalence classes met by ``xs``."""
        return frozenset(self.class_of[x] for x in xs)

    def has_identity_equiv(self):
        return all(len(c) == 1 for c in self.equiv)


@dataclasses.dataclass(frozen=True)
class PrimeES:
    """Prime event structure ``(E, <=, Con)``.

    ``le`` holds the strict causal pairs ``(a, b)`` with ``a < b``, closed
    under transitivity. ``con`` holds the maximal consistent sets.
    """

    events: tuple
    le: frozenset
    con: tuple

    @classmethod
    def build(cls, events, le=(), con=None):
        events = sort_events(events)
        below = transitive_below(events, le)
        pairs = frozenset((a, b) for b in events for a in below[b] if a != b)
        # a cycle shows up as a reflexive pair; keep it visible to validation
        pairs |= frozenset((b, b) for b in events if b in below[b])
        if con is None:
            con = [events]
        return cls(events, pairs, maximal_sets(con))

    @functools.cached_property
    def below(self):
        out = {e: set() for e in self.events}
        for a, b in self.le:
            out.setdefault(b, set()).add(a)
        return {e: frozenset(v) for e, v in out.items()}

    @functools.cached_property
    def above(self):
        out = {e: set() for e in self.events}
        for a, b in self.le:
            out.setdefault(a, set()).add(b)
        return {e: frozenset(v) for e, v in out.items()}

    def leq(self, a, b):
        return a == b or (a, b) in self.le

    def down(self, xs):
        out = set(xs)
        for x in xs:
            out |= self.below.get(x, frozenset())
        return frozenset(out)

    def consistent(self, xs):
        xs = frozenset(xs)
        return not xs or any(xs <= g for g in self.con)

    def covers(self):
        """Covering pairs of the causal order (its Hasse diagram)."""
        out = []
        for a, b in self.le:
            if a == b:
                continue
            if not any((a, c) in self.le and (c, b) in self.le for c in self.events if c not in (a, b)):
                out.append((a, b))
        return sorted(out, key=lambda p: (event_key(p[0]), event_key(p[1])))

    def depth(self, e):
        """Length of a longest causal chain ending at ``e`` (initial events have depth 1)."""
        return self._depths[e]

    @functools.cached_property
    def _depths(self):
        depth = {}
        for e in sorted(self.events, key=lambda e: len(self.below[e])):
            depth[e] = 1 + max((depth[a] for a in self.below[e] if a in depth), default=0)
        return depth

    @functools.cached_property
    def family(self):
        return configurations_prime(self)

    @property
    def kind(self):
        return "prime"


@dataclasses.dataclass(frozen=True)
class Ese(_EquivMixin):
    """Prime event structure with an equivalence relation on its events."""

    base: PrimeES
    equiv: tuple

    @classmethod
    def build(cls, events, le=(), con=None, equiv=()):
        base = PrimeES.build(events, le, con)
        return cls(base, _partition(base.events, equiv))

    @classmethod
    def from_prime(cls, base):
        return cls(base, _partition(base.events, ()))

    events = property(lambda self: self.base.events)
    le = property(lambda self: self.base.le)
    con = property(lambda self: self.base.con)
    below = property(lambda self: self.base.below)
    above = property(lambda self: self.base.above)

    def leq(self, a, b):
        return self.base.leq(a, b)

    def down(self, xs):
        return self.base.down(xs)

    def consistent(self, xs):
        return self.base.consistent(xs)

    def covers(self):
        return self.base.covers()

    def depth(self, e):
        return self.base.depth(e)

    @functools.cached_property
    def family(self):
        return configurations_ese(self)

    @property
    def kind(self):
        return "ese"


@dataclasses.dataclass(frozen=True)
class GeneralES:
    """General event structure ``(E, Con, |-)``.

    ``enabling`` holds generating pairs ``(X, e)``; the relation itself is
    ``Y |- e`` iff ``Y`` is consistent and contains ``X`` for some generator.
    """

    events: tuple
    con: tuple
    enabling: tuple

    @classmethod
    def build(cls, events, con=None, enabling=()):
        events = sort_events(events)
        if con is None:
            con = [events]
        pairs = {(frozenset(x), e) for x, e in enabling}
        ordered = sorted(pairs, key=lambda p: (event_key(p[1]), len(p[0]), tuple(map(event_key, sort_events(p[0])))))
        return cls(events, maximal_sets(con), tuple(ordered))

    def consistent(self, xs):
        xs = frozenset(xs)
        return not xs or any(xs <= g for g in self.con)

    def enables(self, xs, e):
        xs = frozenset(xs)
        return self.consistent(xs) and any(ev == e and x <= xs for x, ev in self.enabling)

    def minimal_enablings(self):
        """Normal form of the enabling relation: minimal consistent generators per event."""
        by_event = defaultdict(set)
        for x, e in self.enabling:
            if self.consistent(x):
                by_event[e].add(x)
        out = {}
        for e, sets in by_event.items():
            out[e] = frozenset(s for s in sets if not any(t < s for t in sets))
        return out

    @functools.cached_property
    def family(self):
        return configurations(self)

    @property
    def kind(self):
        return "general"


@dataclasses.dataclass(frozen=True)
class EquivFamily(_EquivMixin):
    """A finite family of configurations with an equivalence on its events.

    The underlying event set is the union of the configurations.
    """

    configs: frozenset
    equiv: tuple

    @classmethod
    def build(cls, configs, equiv=()):
        configs = frozenset(frozenset(c) for c in configs)
        events = sort_events(set().union(*configs)) if configs else ()
        return cls(configs, _partition(events, equiv))

    @functools.cached_property
    def events(self):
        return sort_events(set().union(*self.configs)) if self.configs else ()

    @functools.cached_property
    def index(self):
        return {e: i for i, e in enumerate(self.events)}

    def mask(self, xs):
        m = 0
        for x in xs:
            m |= 1 << self.index[x]
        return m

    def unmask(self, m):
        return frozenset(e for i, e in enumerate(self.events) if m >> i & 1)

    @functools.cached_property
    def masks(self):
        return frozenset(self.mask(c) for c in self.configs)

    @functools.cached_property
    def maskset(self):
        return kernels.MaskSet(self.masks)

    def sorted_configs(self):
        return sort_sets(self.configs)

    def __contains__(self, xs):
        return frozenset(xs) in self.configs

    @property
    def family(self):
        return self

    @property
    def kind(self):
        return "family"


class Category(str, enum.Enum):
    FAMILY = "family"
    ESE = "ese"
    PRIME = "prime"
    GENERAL = "general"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        aliases = {
            "family": cls.FAMILY, "fam": cls.FAMILY, "fam≡": cls.FAMILY, "fam_equiv": cls.FAMILY,
            "ese": cls.ESE, "e≡": cls.ESE, "e_equiv": cls.ESE, "edc": cls.ESE,
            "prime": cls.PRIME, "e": cls.PRIME, "pes": cls.PRIME,
            "general": cls.GENERAL, "g": cls.GENERAL, "ges": cls.GENERAL,
        }
        try:
            return aliases[str(text).lower()]
        except KeyError:
            raise ValueError(f"unknown category {text!r}") from None


class StructureMap:
    """A partial function between the events of two structures.

    Undefined events are simply absent from ``table``.
    """

    __slots__ = ("source", "target", "table")

    def __init__(self, source, target, table: Mapping[Any, Any]):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "table", types.MappingProxyType(dict(table)))

    def __setattr__(self, name, value):
        raise AttributeError("StructureMap is immutable")

    def __call__(self, e):
        return self.table.get(e)

    def __eq__(self, other):
        if not isinstance(other, StructureMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and dict(self.table) == dict(other.table)

    def __hash__(self):
        return hash(frozenset(self.table.items()))

    def __repr__(self):
        items = ", ".join(f"{show(a)}->{show(b)}" for a, b in self.items())
        return f"StructureMap({{{items}}})"

    def items(self):
        return sorted(self.table.items(), key=lambda kv: event_key(kv[0]))

    def domain(self):
        return frozenset(self.table)

    def image(self, xs):
        return frozenset(self.table[x] for x in xs if x in self.table)

    def is_total(self):
        return all(e in self.table for e in self.source.events)


def identity_map(s):
    return StructureMap(s, s, {e: e for e in s.events})


def compose(g, f):
    """``g`` after ``f``."""
    table = {a: g.table[b] for a, b in f.table.items() if b in g.table}
    return StructureMap(f.source, g.target, table)


# -- configurations -----------------------------------------------------------


def _check_event_cap(s):
    cap = get_caps().events
    if len(s.events) > cap:
        raise ConfigExplosion("events per structure", cap, len(s.events))


def _bfs(n, can_add):
    """Sets reachable from the empty set by adding one admissible element at a time."""
    cap = get_caps().configs
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for i in range(n):
                b = 1 << i
                if x & b:
                    continue
                y = x | b
                if y in seen or not can_add(x, i, y):
                    continue
                seen.add(y)
                if len(seen) > cap:
                    raise ConfigExplosion("configurations", cap, len(seen))
                nxt.append(y)
        frontier = nxt
    return seen


def configurations(g):
    """Finite configurations of a general event structure (identity equivalence)."""
    _check_event_cap(g)
    events = g.events
    idx = {e: i for i, e in enumerate(events)}

    def m(xs):
        out = 0
        for x in xs:
            out |= 1 << idx[x]
        return out

    gens = [m(c) for c in g.con]
    enab = defaultdict(list)
    for x, e in g.enabling:
        if all(a in idx for a in x) and e in idx:
            enab[idx[e]].append(m(x))

    def can_add(x, i, y):
        return any(y & ~c == 0 for c in gens) and any(z & ~x == 0 for z in enab[i])

    found = _bfs(len(events), can_add)
    return EquivFamily.build(frozenset(e for i, e in enumerate(events) if x >> i & 1) for x in found)


def _down_closed_consistent(p):
    _check_event_cap(p)
    events = p.events
    idx = {e: i for i, e in enumerate(events)}
    gens = []
    for c in p.con:
        gm = 0
        for x in c:
            if x in idx:
                gm |= 1 << idx[x]
        gens.append(gm)
    below = []
    for e in events:
        bm = 0
        for a in p.below[e]:
            bm |= 1 << idx[a]
        below.append(bm)

    def can_add(x, i, y):
        return below[i] & ~x == 0 and any(y & ~c == 0 for c in gens)

    found = _bfs(len(events), can_add)
    return [frozenset(e for i, e in enumerate(events) if x >> i & 1) for x in found]


def configurations_prime(p):
    """Configurations of a prime event structure (identity equivalence)."""
    return EquivFamily.build(_down_closed_consistent(p))


def configurations_ese(p):
    """Configurations of an ese paired with its equivalence."""
    if isinstance(p, PrimeES):
        return configurations_prime(p)
    configs = _down_closed_consistent(p)
    present = set().union(*configs)
    classes = [c & present for c in p.equiv]
    return EquivFamily.build(configs, [c for c in classes if c])


def as_family(s):
    """The equivalence family of any structure kind."""
    if isinstance(s, (EquivFamily, PrimeES, Ese, GeneralES)):
        return s.family
    raise KindMismatch(f"not a structure: {type(s).__name__}")


def equiv_of(s):
    """Equivalence test on the events of ``s`` (identity for prime and general)."""
    if isinstance(s, (Ese, EquivFamily)):
        return s.same
    return lambda a, b: a == b


# -- validation ---------------------------------------------------------------


def validate_structure(s):
    """Violation reports for ``s``; empty iff ``s`` is well formed."""
    if isinstance(s, PrimeES):
        return _validate_prime(s)
    if isinstance(s, Ese):
        return _validate_prime(s.base) + _validate_equiv(s.events, s.equiv)
    if isinstance(s, GeneralES):
        return _validate_general(s)
    if isinstance(s, EquivFamily):
        return _validate_family(s)
    raise KindMismatch(f"not a structure: {type(s).__name__}")


def _validate_names(events):
    out = []
    if len(set(events)) != len(events):
        out.append(Violation("unique-names", tuple(e for e in events if events.count(e) > 1)))
    for e in events:
        if isinstance(e, str) and not e.strip():
            out.append(Violation("nonempty-name", (e,)))
    return out


def _validate_prime(p):
    out = _validate_names(p.events)
    evs = set(p.events)
    for a, b in sorted(p.le, key=lambda ab: (event_key(ab[0]), event_key(ab[1]))):
        if a not in evs or b not in evs:
            out.append(Violation("order-events", (a, b), "pair mentions an unknown event"))
        elif a == b:
            out.append(Violation("partial-order", (a,), "causal cycle through this event"))
        elif (b, a) in p.le and event_key(a) < event_key(b):
            out.append(Violation("partial-order", (a, b), "antisymmetry fails"))
    for g in p.con:
        if not g <= evs:
            out.append(Violation("con-events", (g,), "consistent set mentions an unknown event"))
    for e in p.events:
        if not p.consistent({e}):
            out.append(Violation("con-singleton", (e,), "singleton is not consistent"))
    for g in p.con:
        closed = p.down(g)
        if not p.consistent(closed):
            out.append(Violation("con-predecessor-closure", (g, closed - g),
                                 "adding causal predecessors leaves Con"))
    return out


def _validate_equiv(events, classes):
    out = []
    seen = {}
    evs = set(events)
    for c in classes:
        for e in sort_events(c):
            if e not in evs:
                out.append(Violation("equiv-events", (e,), "equivalence mentions an unknown event"))
            elif e in seen:
                out.append(Violation("equiv-partition", (e, seen[e], c), "event in two classes"))
            else:
                seen[e] = c
    for e in events:
        if e not in seen:
            out.append(Violation("equiv-partition", (e,), "event in no class"))
    return out


def _validate_general(g):
    out = _validate_names(g.events)
    evs = set(g.events)
    for c in g.con:
        if not c <= evs:
            out.append(Violation("con-events", (c,), "consistent set mentions an unknown event"))
    for x, e in g.enabling:
        if e not in evs or not x <= evs:
            out.append(Violation("enabling-events", (x, e), "enabling mentions an unknown event"))
        elif not g.consistent(x):
            out.append(Violation("enabling-consistent", (x, e), "enabling set is not consistent"))
    return out


def _validate_family(f):
    out = []
    if frozenset() not in f.configs:
        out.append(Violation("empty-configuration", (), "the empty set is not a configuration"))
    out += _validate_equiv(f.events, f.equiv)
    masks = sorted(f.masks, key=lambda m: (bin(m).count("1"), m))
    for i, j in kernels.union_violations(masks, f.maskset):
        x, y = f.unmask(masks[i]), f.unmask(masks[j])
        out.append(Violation("union-closure", (x, y), "compatible configurations whose union is missing"))
    # reachable: configurations built from the empty set one event at a time
    reach = {0} if 0 in f.masks else set()
    queue = deque(reach)
    n = len(f.events)
    while queue:
        x = queue.popleft()
        for i in range(n):
            y = x | (1 << i)
            if y != x and y in f.masks and y not in reach:
                reach.add(y)
                queue.append(y)
    for x in masks:
        cover = 0
        for y in reach:
            if y & ~x == 0:
                cover |= y
        if cover != x:
            out.append(Violation("securing", (f.unmask(x), f.unmask(x & ~cover)),
                                 "events without a securing chain through the family"))
    for x in masks:
        subs = [y for y in masks if y & ~x == 0]
        groups = defaultdict(list)
        for i in range(n):
            if x >> i & 1:
                sig = 0
                for k, y in enumerate(subs):
                    if y >> i & 1:
                        sig |= 1 << k
                groups[sig].append(f.events[i])
        for evs in groups.values():
            if len(evs) > 1:
                out.append(Violation("coincidence-freeness", (f.unmask(x), frozenset(evs)),
                                     "no sub-configuration separates these events"))
    return out


# -- maps ---------------------------------------------------------------------

_KINDS = {
    Category.FAMILY: (EquivFamily, PrimeES, Ese, GeneralES),
    Category.ESE: (Ese, PrimeES),
    Category.PRIME: (PrimeES,),
    Category.GENERAL: (GeneralES,),
}


def check_kinds(m, category):
    category = Category.parse(category)
    allowed = _KINDS[category]
    if not isinstance(m.source, allowed) or not isinstance(m.target, allowed):
        raise KindMismatch(
            f"category {category.value} needs {'/'.join(k.__name__ for k in allowed)}, "
            f"got {type(m.source).__name__} -> {type(m.target).__name__}"
        )
    return category


def validate_map(m, category):
    """Violation reports for ``m`` as a map of ``category``; empty iff it is one."""
    category = check_kinds(m, category)
    out = []
    src_events, tgt_events = set(m.source.events), set(m.target.events)
    for a, b in m.items():
        if a not in src_events:
            out.append(Violation("map-domain", (a,), "not a source event"))
        if b not in tgt_events:
            out.append(Violation("map-range", (b,), "not a target event"))
    if out:
        return out
    if category is Category.GENERAL:
        return _validate_general_map(m)
    src, tgt = as_family(m.source), as_family(m.target)
    table = m.table
    for c in src.equiv:
        defined = [a for a in c if a in table]
        if defined and len(defined) != len(c):
            out.append(Violation("preserve-equiv", (c,), "class partly defined"))
        elif defined:
            first = table[defined[0]]
            for a in defined[1:]:
                if not tgt.same(first, table[a]):
                    out.append(Violation("preserve-equiv", (defined[0], a), "images not equivalent"))
    for x in src.sorted_configs():
        img = m.image(x)
        if img not in tgt.configs:
            out.append(Violation("configuration-image", (x, img), "image is not a configuration"))
        by_class = defaultdict(list)
        for a in sort_events(x):
            if a in table:
                by_class[tgt.class_of[table[a]]].append(a)
        for members in by_class.values():
            for a in members[1:]:
                if not src.same(members[0], a):
                    out.append(Violation("reflect-equiv", (x, members[0], a),
                                         "equivalent images from inequivalent events"))
    return out


def _validate_general_map(m):
    out = []
    s, t = m.source, m.target
    for c in s.con:
        img = m.image(c)
        if not t.consistent(img):
            out.append(Violation("preserve-consistency", (c, img), "image not consistent"))
        seen = {}
        for a in sort_events(c):
            if a in m.table:
                b = m.table[a]
                if b in seen:
                    out.append(Violation("local-injectivity", (c, seen[b], a), "two events share an image"))
                else:
                    seen[b] = a
    for x, e in s.enabling:
        if e in m.table and s.consistent(x):
            if not t.enables(m.image(x), m.table[e]):
                out.append(Violation("preserve-enabling", (x, e), "image enabling missing"))
    return out


def map_equiv(m1, m2):
    """Same domain of definition and equivalent images pointwise."""
    if m1.source != m2.source or m1.target != m2.target:
        raise KindMismatch("maps do not share source and target")
    if m1.domain() != m2.domain():
        return False
    same = equiv_of(m1.target)
    return all(same(m1.table[a], m2.table[a]) for a in m1.table)


def is_isomorphism(m, category):
    """Total bijection whose inverse is again a map of ``category``."""
    if validate_map(m, category):
        return False
    if not m.is_total():
        return False
    values = list(m.table.values())
    if len(set(values)) != len(values) or set(values) != set(m.target.events):
        return False
    inverse = StructureMap(m.target, m.source, {b: a for a, b in m.table.items()})
    return not validate_map(inverse, category)


# -- general event structures and families ------------------------------------


def is_replete(g):
    """Every event enabled, every consistent set extendable, every enabling witnessed."""
    fam = g.family
    enab = g.minimal_enablings()
    if any(not enab.get(e) for e in g.events):
        return False
    for c in g.con:
        if not any(c <= x for x in fam.configs):
            return False
    for x, e in g.enabling:
        if not g.consistent(x):
            continue
        if not any(e in y and y <= x | {e} for y in fam.configs):
            return False
    return True


def fam_to_ges(f):
    """The canonical general event structure of a family with identity equivalence."""
    if not f.has_identity_equiv():
        raise KindMismatch("fam_to_ges needs a family with the identity equivalence")
    con = maximal_sets(f.configs) if f.configs else ()
    pairs = set()
    for y in f.configs:
        for a in y:
            pairs.add((y - {a}, a))
    by_event = defaultdict(set)
    for x, a in pairs:
        by_event[a].add(x)
    minimal = [(x, a) for a, sets in by_event.items() for x in sets if not any(t < x for t in sets)]
    return GeneralES.build(f.events, con=[c for c in con if c] or [()], enabling=minimal)


def irreducibles(f):
    """Configurations ``x`` with an event ``e`` such that ``x`` is the only configuration between ``e`` and ``x``."""
    out = []
    masks = f.masks
    for x in masks:
        subs = [y for y in masks if y & ~x == 0]
        for i in range(len(f.events)):
            if not x >> i & 1:
                continue
            if all(y == x for y in subs if y >> i & 1):
                out.append(f.unmask(x))
                break
    return sort_sets(out)
