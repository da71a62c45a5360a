"""Graphviz output.

Causal order is drawn by its covering pairs as directed edges; each
equivalence class becomes a chain of undirected, tripled edges between
consecutive members. General event structures draw one dashed edge per
element of each minimal enabling set.
"""

from .events import event_key, show, sort_events
from .realisations import Realisation
from .structures import Ese, EquivFamily, GeneralES, PrimeES


def _quote(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _equiv_edges(classes):
    out = []
    for c in sorted(classes, key=lambda c: event_key(min(c, key=event_key))):
        members = sort_events(c)
        for a, b in zip(members, members[1:]):
            out.append(f'  {_quote(show(a))} -> {_quote(show(b))} [dir=none, color="black:invis:black", constraint=false];')
    return out


def _graph(name, nodes, edges):
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    lines += [f"  {n}" for n in nodes]
    lines += edges
    lines.append("}")
    return "\n".join(lines) + "\n"


def _cover_edges(events, covers):
    edges = []
    for a, b in sorted(covers, key=lambda p: (event_key(p[0]), event_key(p[1]))):
        edges.append(f"  {_quote(show(a))} -> {_quote(show(b))};")
    return edges


def export_dot(obj, name="G"):
    """DOT text for a structure, family or realisation."""
    if isinstance(obj, PrimeES):
        obj = Ese.from_prime(obj)
    if isinstance(obj, Ese):
        nodes = [f"{_quote(show(e))};" for e in obj.events]
        edges = _cover_edges(obj.events, obj.covers())
        edges += _equiv_edges(c for c in obj.equiv if len(c) > 1)
        return _graph(name, nodes, edges)
    if isinstance(obj, GeneralES):
        nodes = [f"{_quote(show(e))};" for e in obj.events]
        edges = []
        for x, e in _enablings(obj):
            for d in sort_events(x):
                edges.append(f"  {_quote(show(d))} -> {_quote(show(e))} [style=dashed];")
        return _graph(name, nodes, edges)
    if isinstance(obj, EquivFamily):
        # the Hasse diagram of configurations under inclusion
        configs = obj.sorted_configs()
        label = {x: "{" + ",".join(show(e) for e in sort_events(x)) + "}" for x in configs}
        nodes = [f"{_quote(label[x])};" for x in configs]
        edges = []
        for x in configs:
            for y in configs:
                if x < y and len(y) == len(x) + 1:
                    edges.append(f"  {_quote(label[x])} -> {_quote(label[y])};")
        return _graph(name, nodes, edges)
    if isinstance(obj, Realisation):
        names = obj.node_names()
        nodes = [f"{_quote(names[i])} [label={_quote(show(obj.labels[i]))}];" for i in range(obj.n)]
        edges = [f"  {_quote(names[i])} -> {_quote(names[j])};" for i, j in sorted(obj.covers())]
        return _graph(name, nodes, edges)
    raise TypeError(f"cannot draw {type(obj).__name__}")


def _enablings(g):
    out = []
    for e, sets in sorted(g.minimal_enablings().items(), key=lambda kv: event_key(kv[0])):
        for x in sorted(sets, key=lambda s: (len(s), sort_events(s))):
            out.append((x, e))
    return out
