"""Seeded random structures for property tests and benchmarks.

All generators take a :class:`random.Random` so runs are reproducible.
"""

import itertools
import random
import string

from .constructions import restrict_to_ax
from .realisations import Realisation, is_realisation
from .structures import (
    Ese,
    EquivFamily,
    GeneralES,
    PrimeES,
    configurations,
    maximal_sets,
    transitive_below,
    validate_structure,
)
from .unfolding import check_structural_axioms, er

LETTERS = string.ascii_lowercase


def _rng(rng):
    return rng if isinstance(rng, random.Random) else random.Random(rng)


def _conflict_free_maximal(events, conflict):
    """Maximal sets with no conflicting pair (brute force; events are few)."""
    events = list(events)
    good = []
    for k in range(len(events), -1, -1):
        for xs in itertools.combinations(events, k):
            s = frozenset(xs)
            if any(s <= g for g in good):
                continue
            if any(frozenset((a, b)) in conflict for a, b in itertools.combinations(xs, 2)):
                continue
            good.append(s)
    return maximal_sets(good) or [frozenset()]


def random_partition(rng, events, merge=0.3):
    """Random equivalence: each event joins an earlier class with probability ``merge``."""
    rng = _rng(rng)
    classes = []
    for e in events:
        if classes and rng.random() < merge:
            rng.choice(classes).add(e)
        else:
            classes.append({e})
    return [c for c in classes if len(c) > 1]


def random_ges(rng, n=5, conflict=0.15, max_enablings=2):
    rng = _rng(rng)
    events = LETTERS[:n]
    enabling = []
    for e in events:
        others = [d for d in events if d != e]
        for _ in range(rng.randint(1, max_enablings)):
            k = rng.choice([0, 0, 1, 1, 2])
            enabling.append((tuple(rng.sample(others, min(k, len(others)))), e))
    clash = {frozenset(p) for p in itertools.combinations(events, 2) if rng.random() < conflict}
    return GeneralES.build(events, _conflict_free_maximal(events, clash), enabling)


def random_family(rng, n=5, merge=0.3, **kw):
    """Configurations of a random general event structure with a random equivalence."""
    rng = _rng(rng)
    fam = configurations(random_ges(rng, n, **kw))
    equiv = random_partition(rng, fam.events, merge)
    return EquivFamily.build(fam.configs, equiv)


def random_prime(rng, n=5, order=0.3, conflict=0.15):
    rng = _rng(rng)
    events = LETTERS[:n]
    le = [(events[i], events[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < order]
    below = transitive_below(events, le)
    clash = set()
    for a, b in itertools.combinations(events, 2):
        if a not in below[b] and b not in below[a] and rng.random() < conflict:
            clash.add(frozenset((a, b)))
    # conflict is inherited upwards
    changed = True
    while changed:
        changed = False
        for pair in list(clash):
            a, b = tuple(pair)
            for x, y in ((a, b), (b, a)):
                for z in events:
                    if x in below[z] and frozenset((z, y)) not in clash and z != y:
                        clash.add(frozenset((z, y)))
                        changed = True
    # events whose own history clashes are dropped
    keep = [e for e in events
            if not any(frozenset(p) in clash for p in itertools.combinations(below[e] | {e}, 2))]
    le = [(a, b) for a, b in le if a in keep and b in keep]
    return PrimeES.build(keep, le, _conflict_free_maximal(keep, clash))


def random_ese(rng, n=5, merge=0.3, **kw):
    rng = _rng(rng)
    p = random_prime(rng, n, **kw)
    return Ese(p, Ese.build(p.events, p.le, p.con, random_partition(rng, p.events, merge)).equiv)


def random_edc(rng, n=5, **kw):
    """A random ese cut down to its part satisfying Ax1."""
    return restrict_to_ax(random_ese(rng, n, **kw), 1)


def random_realisation(rng, f, max_nodes=7, tries=200):
    """A random realisation of ``f`` or ``None`` if rejection sampling gives up.

    Half the time a securing chain of a random configuration is loosened by
    dropping order pairs; otherwise a random labelled order is tried directly.
    """
    rng = _rng(rng)
    events = list(f.events)
    if not events:
        return Realisation((), ())
    for _ in range(tries):
        if rng.random() < 0.5:
            r = _loosened_chain(rng, f, max_nodes)
        else:
            n = rng.randint(1, max_nodes)
            labels = [rng.choice(events) for _ in range(n)]
            pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
            r = Realisation.build(labels, pairs)
        if r is not None and r.n <= max_nodes and is_realisation(r, f):
            return r
    return None


def _loosened_chain(rng, f, max_nodes):
    x = frozenset()
    chain = []
    configs = f.configs
    while len(chain) < max_nodes:
        steps = [e for e in f.events if e not in x and (x | {e}) in configs]
        if not steps or (chain and rng.random() < 0.2):
            break
        e = rng.choice(steps)
        chain.append(e)
        x = x | {e}
    r = Realisation.chain(chain)
    pairs = [(i, j) for j in range(r.n) for i in r.below[j]]
    rng.shuffle(pairs)
    for pair in pairs:
        kept = [p for p in ((i, j) for j in range(r.n) for i in r.below[j]) if p != pair]
        r2 = Realisation.build(r.labels, kept)
        if rng.random() < 0.6 and is_realisation(r2, f):
            r = r2
    return r


# -- ese's satisfying the structural axioms -----------------------------------


def _perturb(rng, p):
    """One random edit of an ese; the result may be invalid."""
    events = list(p.events)
    le = set(p.le)
    classes = [set(c) for c in p.equiv]
    con = [set(g) for g in p.con]
    op = rng.choice(["split", "merge", "add-order", "drop-order", "drop-event"])
    if op == "split" and any(len(c) > 1 for c in classes):
        c = rng.choice([c for c in classes if len(c) > 1])
        e = rng.choice(sorted(c))
        c.discard(e)
        classes.append({e})
    elif op == "merge" and len(classes) > 1:
        a, b = rng.sample(range(len(classes)), 2)
        classes[a] |= classes[b]
        classes[b] = set()
    elif op == "add-order" and len(events) > 1:
        a, b = rng.sample(events, 2)
        le.add((a, b))
    elif op == "drop-order" and le:
        le.discard(rng.choice(sorted(le)))
    elif op == "drop-event" and events:
        maximal = [e for e in events if not any(a == e for a, _ in le)]
        e = rng.choice(maximal)
        events.remove(e)
        le = {(a, b) for a, b in le if e not in (a, b)}
        classes = [c - {e} for c in classes]
        con = [g - {e} for g in con]
    try:
        q = Ese.build(events, le, con or [()], [c for c in classes if len(c) > 1])
    except Exception:
        return None
    return None if validate_structure(q) else q


def random_axiomatic_ese(rng, n=5, steps=2, tries=50, **kw):
    """An ese satisfying (A)-(D): unfold a random family, perturb, keep what passes."""
    rng = _rng(rng)
    for _ in range(tries):
        p = er(random_family(rng, n, merge=0.0, **kw)).ese
        for _ in range(rng.randint(0, steps)):
            q = _perturb(rng, p)
            if q is not None and check_structural_axioms(q).all_hold():
                p = q
        if check_structural_axioms(p).all_hold():
            return p
    raise RuntimeError("no ese satisfying the axioms found")
