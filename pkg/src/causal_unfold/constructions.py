"""Hiding, the axiom hierarchy, stable equivalence families and limits of families."""

import dataclasses
from collections import defaultdict
from typing import NamedTuple

from . import kernels
from .caps import get_caps
from .errors import ConfigExplosion, KindMismatch, NotEquivClosed, NotStable
from .events import PairEvent, event_key, show, sort_events, sort_sets
from .structures import (
    Ese,
    EquivFamily,
    PrimeES,
    StructureMap,
    as_family,
    configurations_ese,
    maximal_sets,
)

# -- hiding -------------------------------------------------------------------


def _as_ese(p):
    if isinstance(p, PrimeES):
        return Ese.from_prime(p)
    if not isinstance(p, Ese):
        raise KindMismatch(f"expected an ese, got {type(p).__name__}")
    return p


def hide(p, visible):
    """Project ``p`` onto an equivalence-closed set of visible events."""
    p = _as_ese(p)
    v = frozenset(visible)
    unknown = v - set(p.events)
    if unknown:
        raise NotEquivClosed(f"unknown events: {', '.join(map(show, sort_events(unknown)))}")
    for c in p.equiv:
        if c & v and not c <= v:
            raise NotEquivClosed(f"class {{{', '.join(map(show, sort_events(c)))}}} is only partly visible")
    events = sort_events(v)
    le = frozenset((a, b) for a, b in p.le if a in v and b in v)
    con = maximal_sets(g & v for g in p.con) if events else (frozenset(),)
    base = PrimeES(events, le, tuple(c for c in con))
    return Ese(base, tuple(c for c in p.equiv if c <= v))


def factor_partial_map(m):
    """Split a partial map into the projection onto its domain and its defined part."""
    p = _as_ese(m.source)
    dom = m.domain()
    mid = hide(p, dom)
    projection = StructureMap(p, mid, {e: e for e in dom})
    defined = StructureMap(mid, m.target, dict(m.table))
    return projection, defined


# -- the axiom hierarchy ------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class AxReport:
    ax0: bool
    ax1: bool
    ax2: bool

    def level(self):
        """Strongest axiom satisfied (0, 1, 2) or ``None``."""
        for k in (0, 1, 2):
            if getattr(self, f"ax{k}"):
                return k
        return None


def _ambiguous(p, xs):
    """Does ``xs`` hold two distinct equivalent events?"""
    seen = set()
    for x in xs:
        c = p.class_of[x]
        if c in seen:
            return True
        seen.add(c)
    return False


def _ax1_ok(p, e):
    return not _ambiguous(p, p.below[e] | {e})


def _ax2_ok(p, e):
    down = p.below[e] | {e}
    return not any(a != b and p.same(a, b) for b in down for a in p.below[b])


def check_ax(p):
    p = _as_ese(p)
    ax0 = not any(_ambiguous(p, g) for g in p.con)
    ax1 = all(_ax1_ok(p, e) for e in p.events)
    ax2 = all(_ax2_ok(p, e) for e in p.events)
    return AxReport(ax0, ax1, ax2)


def restrict_to_ax(p, level):
    """The largest part of ``p`` satisfying Ax``level``.

    Events whose down-set breaks the axiom are dropped. At level 0 a set stays
    consistent only if its down-closure has no two distinct equivalent events.
    """
    p = _as_ese(p)
    if level == 2:
        keep = {e for e in p.events if _ax2_ok(p, e)}
    elif level in (0, 1):
        keep = {e for e in p.events if _ax1_ok(p, e)}
    else:
        raise ValueError(f"level must be 0, 1 or 2, not {level!r}")
    q = hide_unchecked(p, keep)
    if level != 0:
        return q
    gens = []
    idx = {e: i for i, e in enumerate(q.events)}
    below = [sum(1 << idx[d] for d in q.below[e]) for e in q.events]
    for g in q.con:
        within = sum(1 << idx[e] for e in q.down(g))
        for m in kernels.down_sets(below, within):
            xs = frozenset(q.events[i] for i in range(len(q.events)) if m >> i & 1)
            if not _ambiguous(q, xs):
                gens.append(xs)
    con = maximal_sets(gens) if q.events else (frozenset(),)
    return Ese(PrimeES(q.events, q.le, con), q.equiv)


def hide_unchecked(p, keep):
    """Restriction to ``keep`` without requiring equivalence-closure."""
    keep = frozenset(keep)
    events = sort_events(keep)
    le = frozenset((a, b) for a, b in p.le if a in keep and b in keep)
    con = maximal_sets(g & keep for g in p.con) if events else (frozenset(),)
    classes = [c & keep for c in p.equiv if c & keep]
    return Ese(PrimeES(events, le, con), sort_sets(classes))


def forget_equiv(p):
    return _as_ese(p).base


def with_identity_equiv(p):
    return Ese.from_prime(p)


# -- stable equivalence families ----------------------------------------------


@dataclasses.dataclass(frozen=True)
class StabilityReport:
    stable: bool
    witnesses: tuple

    def __bool__(self):
        return self.stable


def _unamb_masks(f):
    cbit = {}
    for k, c in enumerate(f.equiv):
        for e in c:
            cbit[f.index[e]] = 1 << k
    out = []
    for m in f.masks:
        cls = 0
        ok = True
        i = 0
        mm = m
        while mm:
            if mm & 1:
                b = cbit[i]
                if cls & b:
                    ok = False
                    break
                cls |= b
            mm >>= 1
            i += 1
        if ok:
            out.append(m)
    return out


def is_stable_ef(f):
    """Check both stability clauses, collecting witnesses."""
    masks = f.masks
    unamb_ms = _unamb_masks(f)
    witnesses = []
    for z in unamb_ms:
        subs = sorted((x for x in masks if x & ~z == 0), key=lambda m: (bin(m).count("1"), m))
        for i, x in enumerate(subs):
            for y in subs[i + 1:]:
                if (x & y) not in masks:
                    witnesses.append(("intersection", f.unmask(x), f.unmask(y), f.unmask(z)))
    for x in sorted(masks, key=lambda m: (bin(m).count("1"), m)):
        cover = 0
        for z in unamb_ms:
            if z & ~x == 0:
                cover |= z
        missing = x & ~cover
        for i in range(len(f.events)):
            if missing >> i & 1:
                witnesses.append(("unambiguous-cover", f.events[i], f.unmask(x)))
    return StabilityReport(not witnesses, tuple(witnesses))


def _require_stable(f):
    report = is_stable_ef(f)
    if not report.stable:
        raise NotStable(report)


def unamb(f):
    """The unambiguous configurations, as a family with identity equivalence."""
    _require_stable(f)
    return EquivFamily.build(f.unmask(m) for m in _unamb_masks(f))


def prime_configurations(f):
    """Pairs ``(a, [a]_x)`` over unambiguous ``x`` and ``a`` in ``x``."""
    masks = f.masks
    out = set()
    for x in _unamb_masks(f):
        subs = [y for y in masks if y & ~x == 0]
        for i in range(len(f.events)):
            if not x >> i & 1:
                continue
            inter = x
            for y in subs:
                if y >> i & 1:
                    inter &= y
            out.add((f.events[i], f.unmask(inter)))
    return sorted(out, key=lambda p: (event_key(p[0]), len(p[1]), tuple(map(event_key, sort_events(p[1])))))


@dataclasses.dataclass(frozen=True)
class PrResult:
    """An edc built from a stable family, with the prime configuration behind each event."""

    ese: Ese
    primes: dict  # event name -> (a, [a]_x)
    counit: StructureMap


def pr_with_table(f):
    _require_stable(f)
    prim = prime_configurations(f)
    counts = defaultdict(int)
    for a, _ in prim:
        counts[a] += 1
    seen = defaultdict(int)
    names = []
    for a, _ in prim:
        if counts[a] == 1:
            names.append(a)
        else:
            seen[a] += 1
            names.append(f"{show(a)}#{seen[a]}")
    le = frozenset((names[i], names[j]) for i, (_, s) in enumerate(prim)
                   for j, (_, t) in enumerate(prim) if i != j and s < t)
    gens = []
    for y in f.configs:
        gens.append(frozenset(names[i] for i, (_, s) in enumerate(prim) if s <= y))
    con = maximal_sets(gens) if names else (frozenset(),)
    classes = defaultdict(set)
    for name, (a, _) in zip(names, prim):
        classes[f.class_of[a]].add(name)
    base = PrimeES(sort_events(names), le, con)
    ese = Ese(base, sort_sets(classes.values()))
    table = dict(zip(names, prim))
    counit = StructureMap(ese, f, {n: a for n, (a, _) in table.items()})
    return PrResult(ese, table, counit)


def pr(f):
    """The edc of prime configurations of a stable family."""
    return pr_with_table(f).ese


# -- products and pullbacks ---------------------------------------------------


class Span(NamedTuple):
    obj: object
    left: StructureMap
    right: StructureMap


def _grow(events, ok_left, ok_right, extra=None):
    """Sets reachable from the empty set one event at a time with both projections valid."""
    cap = get_caps().configs
    n = len(events)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for i in range(n):
                y = x | (1 << i)
                if y == x or y in seen:
                    continue
                if not ok_left(y) or not ok_right(y):
                    continue
                if extra is not None and not extra(x, i):
                    continue
                seen.add(y)
                if len(seen) > cap:
                    raise ConfigExplosion("configurations of the construction", cap, len(seen))
                nxt.append(y)
        frontier = nxt
    return [frozenset(events[i] for i in range(n) if x >> i & 1) for x in seen]


def _projector(events, f, side):
    bits = []
    for d in events:
        comp = d[side]
        bits.append(0 if comp is None else 1 << f.index[comp])
    masks = f.masks

    def ok(y):
        img = 0
        i = 0
        while y:
            if y & 1:
                img |= bits[i]
            y >>= 1
            i += 1
        return img in masks

    return ok


def _pair_equiv(events, fa, fb):
    def key(d):
        left = None if d.left is None else fa.class_of[d.left]
        right = None if d.right is None else fb.class_of[d.right]
        return (left, right)

    classes = defaultdict(set)
    for d in events:
        classes[key(d)].add(d)
    return list(classes.values()), key


def _span(events, configs, classes, fa, fb):
    fam = EquivFamily.build(configs, classes)
    left = StructureMap(fam, fa, {d: d.left for d in fam.events if d.left is not None})
    right = StructureMap(fam, fb, {d: d.right for d in fam.events if d.right is not None})
    return Span(fam, left, right)


def product_events(fa, fb):
    out = [PairEvent(a, None) for a in fa.events]
    out += [PairEvent(None, b) for b in fb.events]
    out += [PairEvent(a, b) for a in fa.events for b in fb.events]
    return sort_events(out)


def product_ef(fa, fb):
    """Product of equivalence families over partial pairs."""
    fa, fb = as_family(fa), as_family(fb)
    events = product_events(fa, fb)
    classes, key = _pair_equiv(events, fa, fb)

    def reflect(x, i):
        # adding events[i] must keep: equivalent components force equivalent pairs
        d = events[i]
        kd = key(d)
        for j in range(len(events)):
            if x >> j & 1:
                c = events[j]
                kc = key(c)
                hit = (d.left is not None and c.left is not None and kd[0] == kc[0]) or \
                      (d.right is not None and c.right is not None and kd[1] == kc[1])
                if hit and kd != kc:
                    return False
        return True

    configs = _grow(events, _projector(events, fa, 0), _projector(events, fb, 1), reflect)
    return _span(events, configs, classes, fa, fb)


def _check_cospan(m1, m2):
    if not m1.is_total() or not m2.is_total():
        raise KindMismatch("pullbacks are only built for total maps")
    if as_family(m1.target) != as_family(m2.target):
        raise KindMismatch("maps do not share a target")


def _paired(m1, m2, pseudo):
    fa, fb = as_family(m1.source), as_family(m2.source)
    fc = as_family(m1.target)
    pairs = []
    for a in fa.events:
        for b in fb.events:
            x, y = m1.table[a], m2.table[b]
            if x == y or (pseudo and fc.same(x, y)):
                pairs.append(PairEvent(a, b))
    return fa, fb, sort_events(pairs)


def _pullback(m1, m2, pseudo):
    _check_cospan(m1, m2)
    fa, fb, events = _paired(m1, m2, pseudo)
    classes, _ = _pair_equiv(events, fa, fb)
    configs = _grow(events, _projector(events, fa, 0), _projector(events, fb, 1))
    return _span(events, configs, classes, fa, fb)


def pullback_ef(m1, m2):
    """Pullback of total maps of equivalence families."""
    return _pullback(m1, m2, False)


def pseudo_pullback_ef(m1, m2):
    """Pseudo pullback: pairs whose images are equivalent in the common target."""
    return _pullback(m1, m2, True)


def unions_of_unambiguous(f):
    """Restrict ``f`` to configurations that are unions of unambiguous ones."""
    um = _unamb_masks(f)
    keep = []
    for x in f.masks:
        cover = 0
        for z in um:
            if z & ~x == 0:
                cover |= z
        if cover == x:
            keep.append(f.unmask(x))
    present = set().union(*keep) if keep else set()
    return EquivFamily.build(keep, [c & present for c in f.equiv if c & present])


def _stable_span(span):
    fam = unions_of_unambiguous(span.obj)
    left = StructureMap(fam, span.left.target, {d: v for d, v in span.left.table.items() if d in fam.index})
    right = StructureMap(fam, span.right.target, {d: v for d, v in span.right.table.items() if d in fam.index})
    return Span(fam, left, right)


def stable_product_ef(fa, fb):
    return _stable_span(product_ef(fa, fb))


def stable_pullback_ef(m1, m2):
    return _stable_span(pullback_ef(m1, m2))


def stable_pseudo_pullback_ef(m1, m2):
    return _stable_span(pseudo_pullback_ef(m1, m2))


def _family_map(m):
    return StructureMap(as_family(m.source), as_family(m.target), dict(m.table))


def _edc_span(m1, m2, pseudo):
    for s in (m1.source, m2.source, m1.target):
        if not check_ax(s).ax1:
            raise KindMismatch("edc pullbacks need structures satisfying Ax1")
    build = stable_pseudo_pullback_ef if pseudo else stable_pullback_ef
    span = build(_family_map(m1), _family_map(m2))
    res = pr_with_table(span.obj)
    left = {n: a.left for n, (a, _) in res.primes.items()}
    right = {n: a.right for n, (a, _) in res.primes.items()}
    return Span(res.ese, StructureMap(res.ese, m1.source, left), StructureMap(res.ese, m2.source, right))


def pullback_edc(m1, m2):
    """Pullback of total maps of edc's via stable families."""
    return _edc_span(m1, m2, False)


def pseudo_pullback_edc(m1, m2):
    return _edc_span(m1, m2, True)
