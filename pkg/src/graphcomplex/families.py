"""Named graph families for tests and the command line.

All families carry enough genus to be stable without legs; nests and the
polytope correspondence ignore genus labels, so the choice is immaterial
there.
"""

from __future__ import annotations

from itertools import combinations

from .graphs import ModularGraph, canonicalize, validate


def bouquet(k):
    """k loops at a single vertex of genus 0 (stable for k >= 2, else genus 1)."""
    genus = 0 if 2 * k - 3 >= 0 else 1
    inv = []
    for e in range(k):
        inv += [2 * e + 1, 2 * e]
    return validate(2 * k, inv, [0] * (2 * k), [genus], {})


def path(m):
    """A path of m edges; end vertices carry genus 1, inner ones genus 1."""
    V = m + 1
    inv, adjc = [], []
    k = 0
    for e in range(m):
        inv += [k + 1, k]
        adjc += [e, e + 1]
        k += 2
    return validate(2 * m, inv, adjc, [1] * V, {})


def cycle(m):
    """An m-cycle, all vertices genus 1 (valence 2 needs the label)."""
    V = m
    inv, adjc = [], []
    k = 0
    for e in range(m):
        inv += [k + 1, k]
        adjc += [e, (e + 1) % V]
        k += 2
    return validate(2 * m, inv, adjc, [1] * V, {})


def complete_graph(v):
    """K_v with genus-0 labels and no legs."""
    pairs = list(combinations(range(v), 2))
    inv, adjc = [], []
    k = 0
    for (a, b) in pairs:
        inv += [k + 1, k]
        adjc += [a, b]
        k += 2
    return validate(2 * len(pairs), inv, adjc, [0] * v, {})


def theta():
    """Two vertices joined by three parallel edges."""
    return validate(6, [3, 4, 5, 0, 1, 2], [0, 0, 0, 1, 1, 1], [0, 0], {})


def by_name(name):
    """Resolve 'path:4', 'cycle:5', 'bouquet:3', 'K4', 'theta'."""
    if name == "K4":
        return complete_graph(4)
    if name == "theta":
        return theta()
    if ":" in name:
        fam, _, arg = name.partition(":")
        k = int(arg)
        if fam == "path":
            return path(k)
        if fam == "cycle":
            return cycle(k)
        if fam == "bouquet":
            return bouquet(k)
    raise ValueError("unknown graph family %r" % name)


def canonical_by_name(name):
    cg, _ = canonicalize(by_name(name))
    return cg
