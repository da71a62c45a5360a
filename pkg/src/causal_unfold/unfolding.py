"""The causal unfolding of an equivalence family and the collapse to general event structures."""

import dataclasses
from collections import defaultdict

from . import kernels
from .caps import get_caps
from .errors import AxiomsFailed, ConfigExplosion, KindMismatch
from .events import event_key, show, sort_events
from .realisations import Realisation, prime_extremal_table
from .structures import (
    Category,
    Ese,
    EquivFamily,
    GeneralES,
    PrimeES,
    StructureMap,
    configurations,
    configurations_ese,
    maximal_sets,
    validate_map,
)


@dataclasses.dataclass(frozen=True)
class UnfoldResult:
    """An unfolding together with the causal history behind each of its events."""

    ese: Ese
    prime_table: dict
    counit: StructureMap
    primes: object  # the underlying PrimeTable
    names: tuple    # names[k] is the ese event for prime k

    def history(self, event):
        return self.prime_table[event]


def _prime_names(labels):
    counts = defaultdict(int)
    for lab in labels:
        counts[lab] += 1
    seen = defaultdict(int)
    names = []
    taken = set()
    for lab in labels:
        if counts[lab] == 1:
            name = lab
        else:
            seen[lab] += 1
            name = f"{show(lab)}#{seen[lab]}"
        while name in taken:
            name = f"{show(name)}'"
        taken.add(name)
        names.append(name)
    return names


def er(f):
    """The ese whose events are the prime extremal realisations of ``f``."""
    pt = prime_extremal_table(f)
    names = _prime_names(pt.labels)
    n = len(names)
    le = frozenset((names[q], names[p]) for p in range(n) for q in pt.pasts[p])
    # configurations of the unfolding: down-closed prime sets labelling into f
    index = f.index
    img = []
    for p in range(n):
        m = 1 << index[pt.labels[p]]
        for q in pt.pasts[p]:
            m |= 1 << index[pt.labels[q]]
        img.append(m)
    fam = f.maskset
    cap = get_caps().configs
    seen = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for p in range(n):
                b = 1 << p
                if x & b:
                    continue
                y = x | b
                if y in seen:
                    continue
                past = 0
                for q in pt.pasts[p]:
                    past |= 1 << q
                if past & ~x:
                    continue
                iy = seen[x] | img[p]
                if iy not in fam:
                    continue
                seen[y] = iy
                if len(seen) > cap:
                    raise ConfigExplosion("configurations of the unfolding", cap, len(seen))
                nxt.append(y)
        frontier = nxt
    configs = [frozenset(names[p] for p in range(n) if x >> p & 1) for x in seen]
    con = maximal_sets(configs)
    by_class = defaultdict(set)
    for p in range(n):
        by_class[f.class_of[pt.labels[p]]].add(names[p])
    base = PrimeES(tuple(sort_events(names)), le, con)
    ese = Ese(base, tuple(sorted((frozenset(c) for c in by_class.values()),
                                 key=lambda c: event_key(min(c, key=event_key)))))
    counit = StructureMap(ese, f, {names[p]: pt.labels[p] for p in range(n)})
    table = {names[p]: pt.realisation(p).canonical() for p in range(n)}
    return UnfoldResult(ese, table, counit, pt, tuple(names))


def counit_check(f, u):
    """The counit is a map of equivalence families from the unfolding to ``f``."""
    return not validate_map(u.counit, Category.FAMILY)


def factor_through_counit(q, f, m, unfolded=None):
    """The map ``h: q -> er(f)`` with ``counit . h = m``, built depth by depth.

    At each event ``e`` of ``q`` on which ``m`` is defined, ``h(e)`` is the
    prime extremal with top label ``m(e)`` and past inside ``h`` of the past of
    ``e``; among several such, the least canonical code wins.
    """
    if isinstance(q, PrimeES):
        q = Ese.from_prime(q)
    if not isinstance(q, Ese):
        raise KindMismatch("factor_through_counit needs an ese source")
    u = unfolded or er(f)
    pt = u.primes
    by_label = defaultdict(list)
    for k, lab in enumerate(pt.labels):
        by_label[lab].append(k)  # already in code order
    h = {}
    for e in sorted(q.events, key=lambda e: (len(q.below[e]), event_key(e))):
        if e not in m.table:
            continue
        past = {h[d] for d in q.below[e] if d in h}
        choice = None
        for k in by_label[m.table[e]]:
            if pt.pasts[k] <= past:
                choice = k
                break
        if choice is None:
            raise AssertionError(f"no prime extremal over {show(m.table[e])} fits below {show(e)}")
        h[e] = choice
    return StructureMap(q, u.ese, {e: u.names[k] for e, k in h.items()})


def _realisation_of_downset(p, event, label):
    nodes = sort_events(p.down({event}))
    pos = {e: i for i, e in enumerate(nodes)}
    return Realisation(tuple(label(e) for e in nodes),
                       tuple(frozenset(pos[d] for d in p.below[e]) for e in nodes))


def _match_primes(p, u, label):
    by_code = {u.primes.codes[k]: u.names[k] for k in range(len(u.names))}
    table = {}
    for e in p.events:
        code = _realisation_of_downset(p, e, label).code
        if code not in by_code:
            raise AssertionError(f"history of {show(e)} is not a prime extremal")
        table[e] = by_code[code]
    return table


def unit_iso_ese(p):
    """Each event goes to the prime extremal carried by its down-set."""
    if isinstance(p, PrimeES):
        p = Ese.from_prime(p)
    u = er(configurations_ese(p))
    return StructureMap(p, u.ese, _match_primes(p, u, lambda e: e))


# -- collapse -----------------------------------------------------------------


def class_name(cls):
    """Name of an equivalence class in the collapse: its least member."""
    return min(cls, key=event_key)


def col(f):
    """Collapse an equivalence family to a general event structure on its classes."""
    name = {e: class_name(c) for e, c in f.class_of.items()}
    events = sorted({class_name(c) for c in f.equiv if c & set(f.events)}, key=event_key)
    ys = {frozenset(name[a] for a in y) for y in f.configs}
    enabling = set()
    for y in ys:
        for e in y:
            enabling.add((y - {e}, e))
    by_event = defaultdict(set)
    for x, e in enabling:
        by_event[e].add(x)
    minimal = [(x, e) for e, xs in by_event.items() for x in xs if not any(o < x for o in xs)]
    return GeneralES.build(events, con=maximal_sets(ys) or [()], enabling=minimal)


def fam(g):
    """Configurations of a general event structure with the identity equivalence."""
    return configurations(g)


def unit(f):
    """The unit ``f -> fam(col(f))`` sending an event to its class."""
    target = fam(col(f))
    return StructureMap(f, target, {e: class_name(f.class_of[e]) for e in f.events})


def factor_through_unit(f, b, m):
    """The unique ``k: col(f) -> b`` with ``fam(k) . unit = m``."""
    c = col(f)
    table = {}
    for a, v in m.table.items():
        table[class_name(f.class_of[a])] = v
    return StructureMap(c, b, table)


def collapse_counit(g):
    """The map ``col(fam(g)) -> g`` sending each singleton class to its event."""
    c = col(fam(g))
    return StructureMap(c, g, {e: e for e in c.events})


def causal_unfolding(g):
    return er(fam(g))


# -- structural axioms --------------------------------------------------------


@dataclasses.dataclass
class AxiomReport:
    """One flag per axiom, with a witness for each failure."""

    A: bool
    B: bool
    C: bool
    D: bool
    D_prime: bool
    D1: bool
    D1_prime: bool
    witnesses: dict

    def all_hold(self):
        return self.A and self.B and self.C and self.D

    def as_dict(self):
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D,
                "D'": self.D_prime, "D1": self.D1, "D1'": self.D1_prime}


def check_structural_axioms(p):
    """Decide the axioms characterising unfoldings by finite quantification."""
    if isinstance(p, PrimeES):
        p = Ese.from_prime(p)
    events = p.events
    idx = {e: i for i, e in enumerate(events)}
    below = [sum(1 << idx[d] for d in p.below[e]) for e in events]
    fam = p.family
    conf = {sum(1 << idx[e] for e in x) for x in fam.configs}
    cls_id = {}
    for k, c in enumerate(p.equiv):
        for e in c:
            cls_id[e] = k
    cbit = [1 << cls_id[e] for e in events]

    def classes(m):
        out = 0
        for i in range(len(events)):
            if m >> i & 1:
                out |= cbit[i]
        return out

    def members(m):
        return frozenset(events[i] for i in range(len(events)) if m >> i & 1)

    def unamb(m):
        return bin(classes(m)).count("1") == bin(m).count("1")

    full = (1 << len(events)) - 1
    witnesses = {}
    conf_classes = defaultdict(list)
    for x in conf:
        conf_classes[classes(x)].append(x)

    # (A)
    a_ok = True
    for x in kernels.down_sets(below, full):
        if x not in conf and classes(x) in conf_classes:
            a_ok = False
            witnesses.setdefault("A", (members(x), members(conf_classes[classes(x)][0])))
            break
    # (B)
    b_ok = True
    for c in p.equiv:
        seen = {}
        for e in sort_events(c):
            if p.below[e] in seen:
                b_ok = False
                witnesses.setdefault("B", (seen[p.below[e]], e))
            seen[p.below[e]] = e
    # (C)
    c_ok = True
    for e in events:
        past = below[idx[e]]
        for x in kernels.down_sets(below, past):
            if x == past:
                continue
            xc = classes(x)
            for q in p.class_of[e]:
                qc = classes(below[idx[q]])
                if qc & ~xc == 0:
                    c_ok = False
                    witnesses.setdefault("C", (members(x), e, q))
    # (D) and (D1)
    d_ok = d1_ok = True
    down_t = [below[i] | (1 << i) for i in range(len(events))]
    for x in conf:
        xc = classes(x)
        for i, t in enumerate(events):
            z = x | down_t[i]
            if z not in conf or classes(z) != xc | cbit[i]:
                continue
            if any((x | (1 << idx[q])) in conf for q in p.class_of[t]):
                continue
            d_ok = False
            witnesses.setdefault("D", (members(x), t))
            if unamb(x):
                d1_ok = False
                witnesses.setdefault("D1", (members(x), t))
    # (D') and (D1'): the extension is asked of y
    dp_ok = d1p_ok = True
    for x in conf:
        for i, t in enumerate(events):
            if x >> i & 1 or (x | (1 << i)) not in conf:
                continue
            for y in conf_classes[classes(x)]:
                if any((y | (1 << idx[q])) in conf for q in p.class_of[t]):
                    continue
                dp_ok = False
                witnesses.setdefault("D'", (members(x), members(y), t))
                if unamb(y):
                    d1p_ok = False
                    witnesses.setdefault("D1'", (members(x), members(y), t))
    return AxiomReport(a_ok, b_ok, c_ok, d_ok, dp_ok, d1_ok, d1p_ok, witnesses)


def rebuild_iso(p):
    """The isomorphism from ``p`` onto the unfolding of its own collapse.

    Raises :class:`AxiomsFailed` naming the first failing axiom.
    """
    if isinstance(p, PrimeES):
        p = Ese.from_prime(p)
    report = check_structural_axioms(p)
    for name in ("A", "B", "C", "D"):
        if not getattr(report, name):
            raise AxiomsFailed(name)
    f = configurations_ese(p)
    u = er(fam(col(f)))
    name = {e: class_name(c) for e, c in f.class_of.items()}
    return StructureMap(p, u.ese, _match_primes(p, u, lambda e: name[e]))
