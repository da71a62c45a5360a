"""JSON reading and writing for structures, maps and realisations.

Schema::

    {"kind": "prime"|"ese"|"general"|"family",
     "events": [...], "le": [[a, b], ...], "con": [[...], ...],
     "equiv": [[...], ...], "enabling": [{"set": [...], "event": e}, ...],
     "configs": [[...], ...]}

    {"kind": "map", "source": <path or object>, "target": <path or object>,
     "table": {a: b}}

Only the keys relevant to a kind are written; ``equiv`` lists non-singleton
classes. ``le`` lists every strict pair on output and may be any generating
set of pairs on input.
"""

import json
import os
from importlib import resources

from .errors import EventStructureError
from .events import event_key, show, sort_events, sort_sets
from .realisations import Realisation
from .structures import Ese, EquivFamily, GeneralES, PrimeES, StructureMap


class ParseError(EventStructureError):
    """Malformed input file."""


KINDS = ("prime", "ese", "general", "family", "map")


def _name(e):
    return e if isinstance(e, str) else show(e)


def _names(xs):
    return [_name(e) for e in sort_events(xs)]


def _sets(sets):
    return [_names(s) for s in sort_sets(sets)]


def _pairs(le):
    return [[_name(a), _name(b)] for a, b in sorted(le, key=lambda p: (event_key(p[0]), event_key(p[1])))]


def _classes(equiv):
    return [_names(c) for c in sort_sets(c for c in equiv if len(c) > 1)]


def to_obj(s):
    """JSON-ready dict for a structure, map or realisation."""
    if isinstance(s, PrimeES):
        return {"kind": "prime", "events": _names(s.events), "le": _pairs(s.le), "con": _sets(s.con)}
    if isinstance(s, Ese):
        return {"kind": "ese", "events": _names(s.events), "le": _pairs(s.le), "con": _sets(s.con),
                "equiv": _classes(s.equiv)}
    if isinstance(s, GeneralES):
        enabling = [{"set": _names(x), "event": _name(e)} for x, e in s.enabling]
        return {"kind": "general", "events": _names(s.events), "con": _sets(s.con), "enabling": enabling}
    if isinstance(s, EquivFamily):
        return {"kind": "family", "events": _names(s.events), "configs": _sets(s.configs),
                "equiv": _classes(s.equiv)}
    if isinstance(s, StructureMap):
        return {"kind": "map", "source": to_obj(s.source), "target": to_obj(s.target),
                "table": {_name(a): _name(b) for a, b in s.items()}}
    if isinstance(s, Realisation):
        return {"kind": "realisation", "labels": [_name(x) for x in s.labels],
                "le": [[a, b] for b in range(s.n) for a in sorted(s.below[b])]}
    raise TypeError(f"cannot serialise {type(s).__name__}")


def dumps(s):
    return json.dumps(to_obj(s), indent=2, sort_keys=False) + "\n"


def _need(obj, key, where, typ=list):
    if key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    val = obj[key]
    if not isinstance(val, typ):
        raise ParseError(f"{where}: {key!r} must be a {typ.__name__}")
    return val


def _str_list(val, where):
    if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
        raise ParseError(f"{where}: expected a list of event names")
    return val


def from_obj(obj, where="<input>", base_dir="."):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: top level must be an object")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise ParseError(f"{where}: unknown kind {kind!r} (expected one of {', '.join(KINDS)})")
    if kind == "map":
        src = _resolve(obj.get("source"), f"{where}.source", base_dir)
        tgt = _resolve(obj.get("target"), f"{where}.target", base_dir)
        table = _need(obj, "table", where, dict)
        for a, b in table.items():
            if not isinstance(b, str):
                raise ParseError(f"{where}.table[{a!r}]: target must be an event name")
        return StructureMap(src, tgt, table)
    events = _str_list(_need(obj, "events", where), f"{where}.events")
    if kind == "family":
        configs = [_str_list(c, f"{where}.configs[{i}]") for i, c in enumerate(_need(obj, "configs", where))]
        equiv = [_str_list(c, f"{where}.equiv[{i}]") for i, c in enumerate(obj.get("equiv", []))]
        fam = EquivFamily.build(configs, equiv)
        extra = set(events) - set(fam.events)
        if extra:
            raise ParseError(f"{where}: events {sorted(extra)} occur in no configuration")
        return fam
    con = obj.get("con")
    if con is not None:
        con = [_str_list(c, f"{where}.con[{i}]") for i, c in enumerate(con)]
    if kind == "general":
        enabling = []
        for i, item in enumerate(obj.get("enabling", [])):
            if not isinstance(item, dict) or "event" not in item:
                raise ParseError(f"{where}.enabling[{i}]: expected {{\"set\": [...], \"event\": e}}")
            enabling.append((_str_list(item.get("set", []), f"{where}.enabling[{i}].set"), item["event"]))
        return GeneralES.build(events, con, enabling)
    le = []
    for i, pair in enumerate(obj.get("le", [])):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise ParseError(f"{where}.le[{i}]: expected a pair of event names")
        if pair[0] != pair[1]:
            le.append(tuple(pair))
    if kind == "prime":
        return PrimeES.build(events, le, con)
    equiv = [_str_list(c, f"{where}.equiv[{i}]") for i, c in enumerate(obj.get("equiv", []))]
    return Ese.build(events, le, con, equiv)


def _resolve(ref, where, base_dir):
    if isinstance(ref, dict):
        return from_obj(ref, where, base_dir)
    if isinstance(ref, str):
        return load(resolve_path(ref, base_dir))
    raise ParseError(f"{where}: expected a file path or an inline structure")


def resolve_path(path, base_dir="."):
    """Find ``path`` directly, relative to ``base_dir``, or among the packaged fixtures."""
    candidates = [path, os.path.join(base_dir, path)]
    name = os.path.basename(path)
    for cand in candidates:
        if os.path.exists(cand):
            return cand
    packaged = fixture_path(name)
    if os.path.exists(packaged):
        return packaged
    return path


def fixture_path(name):
    return str(resources.files("causal_unfold") / "fixtures" / name)


def loads(text, where="<input>", base_dir="."):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return from_obj(obj, where, base_dir)


def load(path):
    path = resolve_path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return loads(text, path, os.path.dirname(path))
