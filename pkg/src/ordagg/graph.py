"""Signed constraint graphs and cut bookkeeping.

Each constraint contributes a fixed pattern of positive and negative edge
weights; parallel contributions aggregate by summation and exact zeros are
dropped. Precedence instances build a directed graph (a cut counts only arcs
leaving S), everything else an undirected one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

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
    Precedes,
)


class CutStatus(Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    OBEYED = "obeyed"
    DISOBEYED = "disobeyed"
    POSTPONED = "postponed"
    UNAFFECTED = "unaffected"


@dataclass(frozen=True)
class SignedGraph:
    n: int
    directed: bool
    weights: dict[tuple[int, int], float]
    w_minus: float

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self.weights:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty.copy(), np.empty(0, dtype=float)
        keys = sorted(self.weights)
        u = np.array([k[0] for k in keys], dtype=np.int64)
        v = np.array([k[1] for k in keys], dtype=np.int64)
        w = np.array([self.weights[k] for k in keys], dtype=float)
        return u, v, w


def build(instance: Instance, cc_mustlink_weight: float = -1.0) -> SignedGraph:
    directed = instance.kind == "mas"
    acc: dict[tuple[int, int], float] = {}

    def add(u: int, v: int, w: float) -> None:
        key = (u, v) if directed or u < v else (v, u)
        acc[key] = acc.get(key, 0.0) + w

    for c in instance.constraints:
        if isinstance(c, Precedes):
            add(c.a, c.b, 1.0)
            add(c.b, c.a, -1.0)
        elif isinstance(c, Between):
            add(c.a, c.c, 2.0)
            add(c.a, c.b, -1.0)
            add(c.b, c.c, -1.0)
        elif isinstance(c, NotBetween):
            add(c.out, c.a, 1.0)
            add(c.out, c.b, 1.0)
            add(c.a, c.b, -2.0)
        elif isinstance(c, CannotLink):
            add(c.a, c.b, 1.0)
        elif isinstance(c, MustLink):
            add(c.a, c.b, cc_mustlink_weight)
        elif isinstance(c, ForbiddenTriplet):
            add(c.a, c.b, 2.0)
            add(c.out, c.a, -1.0)
            add(c.out, c.b, -1.0)
        elif isinstance(c, DesiredTriplet):
            add(c.a, c.b, -2.0)
            add(c.out, c.a, 1.0)
            add(c.out, c.b, 1.0)
        elif isinstance(c, ForbiddenQuartet):
            add(c.a, c.b, 2.0)
            add(c.c, c.d, 2.0)
            for x in (c.a, c.b):
                for y in (c.c, c.d):
                    add(x, y, -1.0)
        elif isinstance(c, DesiredQuartet):
            add(c.a, c.b, -2.0)
            add(c.c, c.d, -2.0)
            for x in (c.a, c.b):
                for y in (c.c, c.d):
                    add(x, y, 1.0)
        else:
            raise TypeError(f"no edge pattern for {type(c).__name__}")

    weights = {k: w for k, w in acc.items() if w != 0.0}
    w_minus = float(sum(-w for w in weights.values() if w < 0.0))
    return SignedGraph(n=instance.n, directed=directed, weights=weights, w_minus=w_minus)


def cut_weight(g: SignedGraph, S) -> float:
    u, v, w = g.edge_arrays
    if w.size == 0:
        return 0.0
    member = np.zeros(g.n, dtype=bool)
    member[list(S)] = True
    if g.directed:
        mask = member[u] & ~member[v]
    else:
        mask = member[u] != member[v]
    return float(w[mask].sum())


def classify(c: Constraint, S) -> CutStatus:
    """Status of one constraint under the cut S / complement."""
    if isinstance(c, Precedes):
        a_in, b_in = c.a in S, c.b in S
        if a_in and not b_in:
            return CutStatus.SATISFIED
        if b_in and not a_in:
            return CutStatus.VIOLATED
        return CutStatus.UNAFFECTED
    if isinstance(c, (MustLink, CannotLink)):
        split = (c.a in S) != (c.b in S)
        if not split:
            return CutStatus.UNAFFECTED
        return CutStatus.SATISFIED if isinstance(c, CannotLink) else CutStatus.VIOLATED
    if isinstance(c, Between):
        a_in, b_in, c_in = c.a in S, c.b in S, c.c in S
        if a_in != c_in:
            return CutStatus.POSTPONED
        return CutStatus.VIOLATED if b_in != a_in else CutStatus.UNAFFECTED
    if isinstance(c, NotBetween):
        a_in, b_in, o_in = c.a in S, c.b in S, c.out in S
        if a_in != b_in:
            return CutStatus.POSTPONED
        return CutStatus.SATISFIED if o_in != a_in else CutStatus.UNAFFECTED
    if isinstance(c, (DesiredTriplet, ForbiddenTriplet)):
        a_in, b_in, o_in = c.a in S, c.b in S, c.out in S
        if a_in != b_in:
            return CutStatus.DISOBEYED
        return CutStatus.OBEYED if o_in != a_in else CutStatus.UNAFFECTED
    if isinstance(c, (DesiredQuartet, ForbiddenQuartet)):
        ins = (c.a in S, c.b in S, c.c in S, c.d in S)
        k = sum(ins)
        if k in (0, 4):
            return CutStatus.UNAFFECTED
        if k in (1, 3):
            return CutStatus.POSTPONED
        return CutStatus.OBEYED if ins[0] == ins[1] else CutStatus.DISOBEYED
    raise TypeError(f"no cut status for {type(c).__name__}")


def check_weight_identity(instance: Instance, S, cc_mustlink_weight: float = -1.0):
    """Cut weight vs its closed form in constraint statuses; returns (lhs, rhs)."""
    g = build(instance, cc_mustlink_weight=cc_mustlink_weight)
    lhs = cut_weight(g, S)
    kind = instance.kind
    if kind == "mas":
        sat = sum(classify(c, S) is CutStatus.SATISFIED for c in instance.constraints)
        vio = sum(classify(c, S) is CutStatus.VIOLATED for c in instance.constraints)
        rhs = float(sat - vio)
    elif kind == "btw":
        post = sum(classify(c, S) is CutStatus.POSTPONED for c in instance.constraints)
        vio = sum(classify(c, S) is CutStatus.VIOLATED for c in instance.constraints)
        rhs = float(post - 2 * vio)
    elif kind == "nonbtw":
        sat = sum(classify(c, S) is CutStatus.SATISFIED for c in instance.constraints)
        post = sum(classify(c, S) is CutStatus.POSTPONED for c in instance.constraints)
        rhs = float(2 * sat - post)
    elif kind == "cc":
        sat = sum(classify(c, S) is CutStatus.SATISFIED for c in instance.constraints)
        vio = sum(classify(c, S) is CutStatus.VIOLATED for c in instance.constraints)
        rhs = float(sat + cc_mustlink_weight * vio)
    elif kind == "triplets":
        rhs = 0.0
        for c in instance.constraints:
            st = classify(c, S)
            if isinstance(c, ForbiddenTriplet):
                rhs += {CutStatus.OBEYED: -2.0, CutStatus.DISOBEYED: 1.0}.get(st, 0.0)
            else:
                rhs += {CutStatus.OBEYED: 2.0, CutStatus.DISOBEYED: -1.0}.get(st, 0.0)
    elif kind == "quartets":
        rhs = 0.0
        for c in instance.constraints:
            st = classify(c, S)
            if isinstance(c, ForbiddenQuartet):
                rhs += {CutStatus.OBEYED: -4.0, CutStatus.DISOBEYED: 2.0}.get(st, 0.0)
            else:
                rhs += {CutStatus.OBEYED: 4.0, CutStatus.DISOBEYED: -2.0}.get(st, 0.0)
    else:
        raise ValueError(f"unknown kind {kind}")
    return lhs, rhs


def to_edge_list(g: SignedGraph) -> str:
    lines = [f"# n={g.n} directed={int(g.directed)}"]
    for (u, v), w in sorted(g.weights.items()):
        lines.append(f"{u} {v} {w:.12g}")
    return "\n".join(lines) + "\n"
