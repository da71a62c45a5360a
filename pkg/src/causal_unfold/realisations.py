"""Causal realisations of an equivalence family.

A realisation is a finite labelled partial order whose down-closed node sets
all label into configurations of the family. Nodes are the integers
``0..n-1``; only labels carry meaning.
"""

import dataclasses
import functools
import itertools
from collections import defaultdict
from typing import Mapping

from . import kernels
from .caps import get_caps
from .errors import SearchExplosion
from .events import event_key, show
from .structures import transitive_below


@dataclasses.dataclass(frozen=True)
class Realisation:
    """Labelled finite poset. ``below[i]`` is the strict down-set of node ``i``."""

    labels: tuple
    below: tuple

    @classmethod
    def build(cls, labels, pairs=()):
        labels = tuple(labels)
        nodes = range(len(labels))
        below = transitive_below(nodes, pairs)
        return cls(labels, tuple(frozenset(below[i]) for i in nodes))

    @classmethod
    def chain(cls, labels):
        """The total order ``labels[0] < labels[1] < ...``."""
        labels = tuple(labels)
        return cls(labels, tuple(frozenset(range(i)) for i in range(len(labels))))

    @property
    def n(self):
        return len(self.labels)

    @functools.cached_property
    def below_masks(self):
        return tuple(sum(1 << j for j in b) for b in self.below)

    @functools.cached_property
    def above(self):
        out = [set() for _ in self.labels]
        for i, b in enumerate(self.below):
            for j in b:
                out[j].add(i)
        return tuple(frozenset(a) for a in out)

    @property
    def full(self):
        return (1 << self.n) - 1

    def leq(self, i, j):
        return i == j or i in self.below[j]

    def image(self, nodes):
        return frozenset(self.labels[i] for i in nodes)

    def down(self, nodes):
        out = set(nodes)
        for i in nodes:
            out |= self.below[i]
        return frozenset(out)

    def is_down_closed(self, nodes):
        nodes = frozenset(nodes)
        return all(self.below[i] <= nodes for i in nodes)

    def top(self):
        """The node above every other node, if there is one."""
        for i in range(self.n):
            if len(self.below[i]) == self.n - 1:
                return i
        return None

    def maximal(self):
        return [i for i in range(self.n) if not self.above[i]]

    def covers(self):
        return [(a, b) for b in range(self.n) for a in sorted(self.below[b])
                if not any(a in self.below[c] for c in self.below[b])]

    def order_size(self):
        """Number of pairs ``a <= b``, reflexive pairs included."""
        return self.n + sum(len(b) for b in self.below)

    def restrict(self, nodes):
        """Induced sub-poset on ``nodes``, with the renumbering ``old -> new``."""
        keep = sorted(nodes)
        new = {old: k for k, old in enumerate(keep)}
        below = tuple(frozenset(new[j] for j in self.below[i] if j in new) for i in keep)
        return Realisation(tuple(self.labels[i] for i in keep), below), new

    @functools.cached_property
    def _canonical(self):
        return _canonical_form(self)

    @property
    def code(self):
        return self._canonical[0]

    def canonical(self):
        """Isomorphic copy with nodes numbered along the canonical linear extension."""
        code, order = self._canonical
        new = {old: k for k, old in enumerate(order)}
        below = tuple(frozenset(new[j] for j in self.below[i]) for i in order)
        return Realisation(tuple(self.labels[i] for i in order), below)

    def canonical_numbering(self):
        """``old -> new`` node numbering used by :meth:`canonical`."""
        return {old: k for k, old in enumerate(self._canonical[1])}

    def describe(self):
        names = self.node_names()
        parts = [names[i] for i in range(self.n)]
        pairs = [f"{names[a]}<{names[b]}" for a, b in self.covers()]
        return "{" + ", ".join(parts) + "}" + (" " + " ".join(pairs) if pairs else "")

    def node_names(self):
        """Readable node names: the label, suffixed when a label repeats."""
        counts = defaultdict(int)
        for lab in self.labels:
            counts[lab] += 1
        seen = defaultdict(int)
        names = []
        for lab in self.labels:
            if counts[lab] == 1:
                names.append(show(lab))
            else:
                seen[lab] += 1
                names.append(f"{show(lab)}{seen[lab]}")
        return names


def isomorphic(r1, r2):
    return r1.code == r2.code


def _canonical_form(r):
    """Minimal code over linear extensions, with the extension achieving it.

    The code lists, in extension order, each node's label key together with
    the sorted positions of its strict down-set; it determines the labelled
    poset up to isomorphism.
    """
    n = r.n
    keys = [event_key(lab) for lab in r.labels]
    masks = r.below_masks
    twin = [(keys[i], r.below[i], r.above[i]) for i in range(n)]
    best = [None, None]
    pos = [-1] * n

    def rec(placed, order, code):
        k = len(order)
        if k == n:
            if best[0] is None or code < best[0]:
                best[0], best[1] = list(code), list(order)
            return
        avail = [i for i in range(n) if not placed >> i & 1 and masks[i] & ~placed == 0]
        entries = {i: (keys[i], tuple(sorted(pos[j] for j in r.below[i]))) for i in avail}
        m = min(entries.values())
        if best[0] is not None:
            prefix = best[0][:k + 1]
            mine = code + [m]
            if mine > prefix:
                return
        tried = set()
        for i in avail:
            if entries[i] != m or twin[i] in tried:
                continue
            tried.add(twin[i])
            pos[i] = k
            order.append(i)
            code.append(m)
            rec(placed | (1 << i), order, code)
            code.pop()
            order.pop()
            pos[i] = -1

    rec(0, [], [])
    return tuple(best[0]), tuple(best[1])


def canonical_code(r):
    return r.code


# -- realisation checks -------------------------------------------------------


def _lbits(r, f):
    try:
        return [1 << f.index[lab] for lab in r.labels]
    except KeyError:
        return None


def is_realisation(r, f):
    """Every down-closed node set labels into a configuration of ``f``."""
    lbits = _lbits(r, f)
    if lbits is None:
        return False
    return kernels.images_all_in(list(r.below_masks), lbits, r.full, f.maskset)


def is_extremal(r, f):
    """Extremality via the two local clauses.

    (i) no node ``n`` has a proper down-closed ``X`` inside its strict past
    with ``X + n`` labelling into a configuration; (ii) no two distinct nodes
    share both strict past and label.
    """
    lbits = _lbits(r, f)
    if lbits is None:
        return False
    seen = set()
    for i in range(r.n):
        key = (r.labels[i], r.below[i])
        if key in seen:
            return False
        seen.add(key)
    return kernels.clause_i_ok(list(r.below_masks), lbits, f.maskset)


def _set_partitions(items):
    """All set partitions of ``items`` (as lists of blocks)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def _label_partitions(r):
    groups = defaultdict(list)
    for i, lab in enumerate(r.labels):
        groups[lab].append(i)
    per_label = [list(_set_partitions(nodes)) for nodes in groups.values()]
    for combo in itertools.product(*per_label):
        blocks = [b for part in combo for b in part]
        if len(blocks) < r.n:
            yield blocks


def _quotient(r, blocks):
    """Coarsest order on ``blocks`` for which the quotient preserves down-sets.

    Block ``C`` lies below block ``B`` iff every node of ``B`` has some node
    of ``C`` in its down-set. Returns ``None`` if this is not antisymmetric.
    """
    q = {}
    for k, b in enumerate(blocks):
        for i in b:
            q[i] = k
    ups = []
    for b in blocks:
        common = None
        for i in b:
            img = {q[j] for j in r.below[i]} | {q[i]}
            common = img if common is None else common & img
        ups.append(common)
    for c, u in enumerate(ups):
        for d in u:
            if d != c and c in ups[d]:
                return None
    labels = [r.labels[b[0]] for b in blocks]
    pairs = [(d, c) for c, u in enumerate(ups) for d in u if d != c]
    return Realisation.build(labels, pairs), q


def one_step_coarsenings(r, f):
    """Realisations ``r'`` with a non-isomorphic total map ``r -> r'``, maximal in order.

    Yields ``(r', table)``. Every non-isomorphic total map out of ``r`` factors
    through one of these: either it identifies nodes (then the coarsest
    quotient order on its fibres is a candidate) or it is the identity on
    nodes with fewer order pairs (then it loses some covering pair).
    """
    cap = get_caps().search
    count = 0
    for blocks in _label_partitions(r):
        count += 1
        if count > cap:
            raise SearchExplosion("label-homogeneous partitions", cap, count)
        got = _quotient(r, blocks)
        if got is None:
            continue
        r2, q = got
        if is_realisation(r2, f):
            yield r2, q
    pairs = [(a, b) for b in range(r.n) for a in r.below[b]]
    for a, b in r.covers():
        r2 = Realisation.build(r.labels, [p for p in pairs if p != (a, b)])
        if is_realisation(r2, f):
            yield r2, {i: i for i in range(r.n)}


def is_extremal_by_definition(r, f):
    """Exhaustive check that every total map out of ``r`` is an isomorphism."""
    for _ in one_step_coarsenings(r, f):
        return False
    return True


def coarsen_with_map(r, f):
    """Descend through coarsenings until extremal.

    Each step takes the candidate with least canonical code among
    :func:`one_step_coarsenings`. Returns the extremal realisation and the
    composite total map from ``r``.
    """
    table = {i: i for i in range(r.n)}
    cur = r
    for _ in range(r.order_size() + 1):
        if is_extremal(cur, f):
            return cur, RealisationMap(r, cur, table)
        options = list(one_step_coarsenings(cur, f))
        if not options:  # cannot happen: clause failures always give a coarsening
            raise AssertionError("non-extremal realisation without a coarsening")
        nxt, step = min(options, key=lambda o: o[0].code)
        table = {i: step[j] for i, j in table.items()}
        cur = nxt
    raise AssertionError("coarsening did not terminate")


def coarsen_to_extremal(r, f):
    return coarsen_with_map(r, f)[0]


# -- maps of realisations -----------------------------------------------------


class RealisationMap:
    """Partial surjective node map between realisations."""

    __slots__ = ("source", "target", "table")

    def __init__(self, source, target, table: Mapping[int, int]):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "table", dict(table))

    def __setattr__(self, name, value):
        raise AttributeError("RealisationMap is immutable")

    def __eq__(self, other):
        if not isinstance(other, RealisationMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.table == other.table

    def __hash__(self):
        return hash(frozenset(self.table.items()))

    def __repr__(self):
        return f"RealisationMap({self.table})"

    def is_total(self):
        return len(self.table) == self.source.n

    def is_projection(self):
        """A reverse inclusion: injective, order-reflecting onto the induced order."""
        if validate_realisation_map(self):
            return False
        t = self.table
        if len(set(t.values())) != len(t):
            return False
        return all((t[a] in self.target.below[t[b]]) == (a in self.source.below[b])
                   for a in t for b in t)


def validate_realisation_map(m):
    """Problems with ``m`` as a realisation map; empty iff it is one."""
    out = []
    s, t, table = m.source, m.target, m.table
    for a, b in table.items():
        if not 0 <= a < s.n or not 0 <= b < t.n:
            out.append(f"node out of range: {a}->{b}")
            return out
        if s.labels[a] != t.labels[b]:
            out.append(f"label mismatch at node {a}")
    if set(table.values()) != set(range(t.n)):
        out.append("not surjective")
    for r in range(s.n):
        down = s.below[r] | {r}
        img = {table[x] for x in down if x in table}
        if not t.is_down_closed(img):
            out.append(f"image of the down-set of node {r} is not down-closed")
    return out


def compose_maps(g, f):
    """``g`` after ``f``."""
    table = {a: g.table[b] for a, b in f.table.items() if b in g.table}
    return RealisationMap(f.source, g.target, table)


def factor_realisation_map(m):
    """Split ``m`` into a projection onto its domain followed by a total map."""
    dom = sorted(m.table)
    r0, new = m.source.restrict(dom)
    projection = RealisationMap(m.source, r0, new)
    total = RealisationMap(r0, m.target, {new[a]: m.table[a] for a in dom})
    return projection, total


def swap_factorisation(projection, total):
    """Turn a projection followed by a total map into a total map then a projection.

    The middle realisation keeps the nodes outside the projection's domain
    and adds the target's nodes; a kept node sits above the images of its
    original predecessors, target nodes keep the target order.
    """
    r, r0, r1 = projection.source, projection.target, total.target
    outside = [i for i in range(r.n) if i not in projection.table]
    k = len(outside)
    g2 = {}
    for pos, i in enumerate(outside):
        g2[i] = pos
    for i, j in projection.table.items():
        g2[i] = k + total.table[j]
    labels = [r.labels[i] for i in outside] + list(r1.labels)
    below = []
    for i in outside:
        below.append(frozenset(g2[a] for a in r.below[i]))
    for b in range(r1.n):
        below.append(frozenset(k + a for a in r1.below[b]))
    mid = Realisation(tuple(labels), tuple(below))
    g1 = RealisationMap(mid, r1, {k + b: b for b in range(r1.n)})
    return RealisationMap(r, mid, g2), g1


def enumerate_realisation_maps(r1, r2):
    """Every realisation map ``r1 -> r2`` by brute force over partial functions."""
    choices = []
    for a in range(r1.n):
        opts = [None] + [b for b in range(r2.n) if r2.labels[b] == r1.labels[a]]
        choices.append(opts)
    out = []
    for combo in itertools.product(*choices):
        table = {a: b for a, b in enumerate(combo) if b is not None}
        m = RealisationMap(r1, r2, table)
        if not validate_realisation_map(m):
            out.append(m)
    return out


def map_between_extremals(r1, r2):
    """The map ``r1 -> r2`` between extremal realisations, if any.

    Found as a rigid embedding of ``r2`` onto a down-closed part of ``r1``;
    the map is its inverse.
    """
    order = sorted(range(r2.n), key=lambda i: len(r2.below[i]))
    g = {}
    used = set()

    def rec(k):
        if k == len(order):
            return True
        v = order[k]
        past = frozenset(g[w] for w in r2.below[v])
        for u in range(r1.n):
            if u in used or r1.labels[u] != r2.labels[v] or r1.below[u] != past:
                continue
            g[v] = u
            used.add(u)
            if rec(k + 1):
                return True
            del g[v]
            used.discard(u)
        return False

    if not rec(0):
        return None
    return RealisationMap(r1, r2, {u: v for v, u in g.items()})


# -- enumeration --------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PrimeTable:
    """Prime extremals of a family, one per isomorphism class.

    Entry ``k`` has top label ``labels[k]`` and strict past ``pasts[k]`` (a set
    of entry indices); entries are sorted by canonical code.
    """

    labels: tuple
    pasts: tuple
    codes: tuple

    def __len__(self):
        return len(self.labels)

    def realisation(self, k):
        """The prime extremal ``k`` as a realisation with its top as last node."""
        nodes = sorted(self.pasts[k]) + [k]
        return self.realisation_of(nodes)

    def realisation_of(self, primes):
        """The extremal realisation carried by a down-closed set of entries."""
        nodes = sorted(primes)
        new = {p: i for i, p in enumerate(nodes)}
        return Realisation(tuple(self.labels[p] for p in nodes),
                           tuple(frozenset(new[q] for q in self.pasts[p]) for p in nodes))


def _prime_code(labels, pasts, k):
    nodes = sorted(pasts[k]) + [k]
    new = {p: i for i, p in enumerate(nodes)}
    r = Realisation(tuple(labels[p] for p in nodes),
                    tuple(frozenset(new[q] for q in pasts[p]) for p in nodes))
    return r.code


def prime_extremal_table(f):
    """Enumerate prime extremals in rounds of increasing depth.

    A prime extremal with top labelled ``e`` is an extremal realisation ``x``
    (a down-closed set of earlier primes) with a new top, such that ``x``
    plus ``e`` labels into a configuration while no proper down-closed part
    of ``x`` plus ``e`` does. Each round only looks at sets ``x`` containing
    a prime found in the previous round.
    """
    cap = get_caps().search
    index = f.index
    nbits = [1 << index[e] for e in f.events]
    fam = f.maskset
    labels, pasts, codes = [], [], []
    img = []   # label image of the down-set of each prime
    configs = {frozenset()}  # down-closed prime sets labelling into f
    conf_img = {frozenset(): 0}
    new = None
    while True:
        if new is None:
            candidates = [frozenset()]
        else:
            candidates = [x for x in configs if x & new]
        below = [sum(1 << q for q in pasts[p]) for p in range(len(labels))]
        lb = [1 << index[lab] for lab in labels]
        found = []
        seen_codes = set(codes)
        for x in sorted(candidates, key=lambda s: (len(s), sorted(s))):
            xm = sum(1 << p for p in x)
            subs = kernels.downset_images(below, lb, xm) if x else [(0, 0)]
            base = conf_img[x]
            for bit, e in zip(nbits, f.events):
                if base & bit or (base | bit) not in fam:
                    continue
                if any(m != xm and (im | bit) in fam for m, im in subs):
                    continue
                found.append((e, x))
        if not found:
            break
        start = len(labels)
        for e, x in found:
            labels.append(e)
            pasts.append(x)
            img.append(conf_img[x] | (1 << index[e]))
            code = _prime_code(labels, pasts, len(labels) - 1)
            if code in seen_codes:
                raise AssertionError("duplicate prime extremal")
            seen_codes.add(code)
            codes.append(code)
        if len(labels) > cap:
            raise SearchExplosion("prime extremals", cap, len(labels))
        new = frozenset(range(start, len(labels)))
        # extend the configurations by the new primes
        frontier = list(configs)
        while frontier:
            nxt = []
            for x in frontier:
                for p in new:
                    if p in x or not pasts[p] <= x:
                        continue
                    y = x | {p}
                    if y in configs:
                        continue
                    iy = conf_img[x] | img[p]
                    if iy not in fam:
                        continue
                    configs.add(y)
                    conf_img[y] = iy
                    nxt.append(y)
            if len(configs) > get_caps().configs:
                raise SearchExplosion("extremal realisations", get_caps().configs, len(configs))
            frontier = nxt
    order = sorted(range(len(labels)), key=lambda k: codes[k])
    renum = {old: k for k, old in enumerate(order)}
    return PrimeTable(
        tuple(labels[k] for k in order),
        tuple(frozenset(renum[q] for q in pasts[k]) for k in order),
        tuple(codes[k] for k in order),
    )


def enumerate_prime_extremals(f):
    """Canonical representatives of the prime extremal classes, by code."""
    table = prime_extremal_table(f)
    return [table.realisation(k).canonical() for k in range(len(table))]


def enumerate_extremals(f):
    """All extremal classes, grown one maximal node at a time.

    Independent of :func:`prime_extremal_table`: every extremal realisation
    minus a maximal node is again extremal, so growing by one node over every
    down-closed past and every label and filtering reaches them all.
    """
    cap = get_caps().search
    empty = Realisation((), ())
    found = {empty.code: empty}
    layer = [empty]
    while layer:
        nxt = []
        for r in layer:
            for past in kernels.down_sets(list(r.below_masks), r.full):
                past_nodes = frozenset(i for i in range(r.n) if past >> i & 1)
                for e in f.events:
                    r2 = Realisation(r.labels + (e,), r.below + (past_nodes,))
                    if not is_realisation(r2, f) or not is_extremal(r2, f):
                        continue
                    c = r2.code
                    if c not in found:
                        found[c] = r2.canonical()
                        nxt.append(found[c])
                        if len(found) > cap:
                            raise SearchExplosion("extremal realisations", cap, len(found))
        layer = nxt
    return sorted(found.values(), key=lambda r: (r.n, r.code))


def enumerate_realisations(f, max_nodes, cap=None, twin_free=False, injective=False):
    """Every realisation of ``f`` with at most ``max_nodes`` nodes, up to isomorphism.

    Removing a maximal node from a realisation leaves a realisation, so
    growing layer by layer over all down-closed pasts and labels is complete.
    With ``twin_free`` only realisations without two nodes sharing label and
    past are produced; that property also survives removing a maximal node.
    """
    cap = cap or get_caps().search
    empty = Realisation((), ())
    found = [empty]
    seen = {empty.code}
    layer = [empty]
    for _ in range(max_nodes):
        nxt = []
        for r in layer:
            for past in kernels.down_sets(list(r.below_masks), r.full):
                past_nodes = frozenset(i for i in range(r.n) if past >> i & 1)
                for e in f.events:
                    if injective and e in r.labels:
                        continue
                    if twin_free and any(r.labels[i] == e and r.below[i] == past_nodes for i in range(r.n)):
                        continue
                    r2 = Realisation(r.labels + (e,), r.below + (past_nodes,))
                    if not is_realisation(r2, f):
                        continue
                    c = r2.code
                    if c in seen:
                        continue
                    seen.add(c)
                    r2 = r2.canonical()
                    found.append(r2)
                    nxt.append(r2)
                    if len(found) > cap:
                        raise SearchExplosion("realisations", cap, len(found))
        layer = nxt
    return found


@dataclasses.dataclass
class ExtremalOrder:
    """Extremal classes with ``leq[i][j]`` true iff element ``i`` is below ``j``."""

    elements: list
    leq: list

    @property
    def primes(self):
        return [i for i, r in enumerate(self.elements) if r.top() is not None]

    @functools.cached_property
    def _ups(self):
        n = len(self.elements)
        return [sum(1 << z for z in range(n) if self.leq[x][z]) for x in range(n)]

    def upper_bounds(self, xs):
        n = len(self.elements)
        m = (1 << n) - 1
        for x in xs:
            m &= self._ups[x]
        return [z for z in range(n) if m >> z & 1]

    def join(self, xs):
        ubs = self.upper_bounds(xs)
        mask = sum(1 << u for u in ubs)
        least = [z for z in ubs if self._ups[z] & mask == mask]
        return least[0] if least else None

    @functools.cached_property
    def _pair_joins(self):
        n = len(self.elements)
        return [[self.join([x, y]) for y in range(n)] for x in range(n)]

    def complete_primes(self):
        n = len(self.elements)
        joins = self._pair_joins
        out = []
        bottom = self.join([])
        for p in range(n):
            if p == bottom:
                continue
            ok = all(
                joins[x][y] is None or not self.leq[p][joins[x][y]] or self.leq[p][x] or self.leq[p][y]
                for x in range(n) for y in range(n)
            )
            if ok:
                out.append(p)
        return out

    def prime_algebraic_problems(self):
        """Failures of finite prime-algebraicity; empty when it holds."""
        n = len(self.elements)
        out = []
        if self.join([]) is None:
            out.append("no least element")
        for x in range(n):
            for y in range(n):
                if self.upper_bounds([x, y]) and self._pair_joins[x][y] is None:
                    out.append(f"compatible {x},{y} without a join")
        primes = self.complete_primes()
        for x in range(n):
            below = [p for p in primes if self.leq[p][x]]
            if self.join(below) != x:
                out.append(f"element {x} is not the join of the primes below it")
        if sorted(primes) != sorted(self.primes):
            out.append("complete primes differ from the classes with a top")
        return out


def extremal_order(f):
    elements = enumerate_extremals(f)
    n = len(elements)
    leq = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            # i below j iff j maps onto i
            leq[i][j] = map_between_extremals(elements[j], elements[i]) is not None
    return ExtremalOrder(elements, leq)
