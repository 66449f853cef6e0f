"""JSON persistence for instances, solutions, and reports.

Output is canonical: sorted keys, two-space indent, trailing newline, so
equal objects serialize to identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .model import (
    Between,
    CannotLink,
    Constraint,
    DesiredQuartet,
    DesiredTriplet,
    ForbiddenQuartet,
    ForbiddenTriplet,
    Instance,
    MustLink,
    NotBetween,
    Partition,
    Precedes,
    Ranking,
    RootedBinaryTree,
    Solution,
    UnrootedTree,
    nested_from_rooted,
    rooted_from_nested,
)

FORMAT_VERSION = 1


def constraint_to_obj(c: Constraint) -> dict:
    if isinstance(c, Precedes):
        return {"t": "prec", "a": c.a, "b": c.b}
    if isinstance(c, Between):
        return {"t": "btw", "a": c.a, "b": c.b, "c": c.c}
    if isinstance(c, NotBetween):
        return {"t": "nbtw", "a": c.a, "b": c.b, "out": c.out}
    if isinstance(c, MustLink):
        return {"t": "ml", "a": c.a, "b": c.b}
    if isinstance(c, CannotLink):
        return {"t": "cl", "a": c.a, "b": c.b}
    if isinstance(c, DesiredTriplet):
        return {"t": "dt", "a": c.a, "b": c.b, "out": c.out}
    if isinstance(c, ForbiddenTriplet):
        return {"t": "ft", "a": c.a, "b": c.b, "out": c.out}
    if isinstance(c, DesiredQuartet):
        return {"t": "dq", "a": c.a, "b": c.b, "c": c.c, "d": c.d}
    if isinstance(c, ForbiddenQuartet):
        return {"t": "fq", "a": c.a, "b": c.b, "c": c.c, "d": c.d}
    raise TypeError(f"cannot serialize {type(c).__name__}")


_FROM_TAG = {
    "prec": (Precedes, ("a", "b")),
    "btw": (Between, ("a", "b", "c")),
    "nbtw": (NotBetween, ("a", "b", "out")),
    "ml": (MustLink, ("a", "b")),
    "cl": (CannotLink, ("a", "b")),
    "dt": (DesiredTriplet, ("a", "b", "out")),
    "ft": (ForbiddenTriplet, ("a", "b", "out")),
    "dq": (DesiredQuartet, ("a", "b", "c", "d")),
    "fq": (ForbiddenQuartet, ("a", "b", "c", "d")),
}


def obj_to_constraint(o: dict) -> Constraint:
    try:
        cls, fields = _FROM_TAG[o["t"]]
    except KeyError as e:
        raise ValueError(f"unknown constraint tag {o.get('t')!r}") from e
    return cls(*(int(o[f]) for f in fields))


def solution_to_obj(sol: Solution) -> dict:
    if isinstance(sol, Ranking):
        return {"ranking": list(sol.order)}
    if isinstance(sol, Partition):
        return {"partition": list(sol.labels)}
    if isinstance(sol, RootedBinaryTree):
        return {"rooted_tree": nested_from_rooted(sol)}
    if isinstance(sol, UnrootedTree):
        return {
            "unrooted_tree": {
                "adjacency": [list(nb) for nb in sol.adjacency],
                "items": [x if x >= 0 else None for x in sol.leaf_item],
            }
        }
    raise TypeError(f"cannot serialize {type(sol).__name__}")


def obj_to_solution(o: dict) -> Solution:
    if "ranking" in o:
        return Ranking(tuple(int(x) for x in o["ranking"]))
    if "partition" in o:
        return Partition(tuple(int(x) for x in o["partition"]))
    if "rooted_tree" in o:
        return rooted_from_nested(o["rooted_tree"])
    if "unrooted_tree" in o:
        body = o["unrooted_tree"]
        adjacency = tuple(tuple(int(x) for x in nb) for nb in body["adjacency"])
        items = tuple(-1 if x is None else int(x) for x in body["items"])
        return UnrootedTree(adjacency, items)
    raise ValueError("no recognized solution key")


def instance_to_obj(inst: Instance, meta: dict | None = None, include_truth: bool = True) -> dict:
    obj = {
        "version": FORMAT_VERSION,
        "kind": inst.kind,
        "n": inst.n,
        "constraints": [constraint_to_obj(c) for c in inst.constraints],
    }
    if include_truth and inst.ground_truth is not None:
        obj["ground_truth"] = solution_to_obj(inst.ground_truth)
    if meta is not None:
        obj["meta"] = meta
    return obj


def obj_to_instance(obj: dict) -> tuple[Instance, dict]:
    if obj.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {obj.get('version')!r}")
    gt = None
    if "ground_truth" in obj:
        gt = obj_to_solution(obj["ground_truth"])
    inst = Instance(
        kind=obj["kind"],
        n=int(obj["n"]),
        constraints=tuple(obj_to_constraint(o) for o in obj["constraints"]),
        ground_truth=gt,
    )
    return inst, obj.get("meta", {})


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    return json.loads(Path(path).read_text())
