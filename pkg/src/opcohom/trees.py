"""Planar rooted trees, grafting, vertex orders and Koszul signs.

A tree is a nested tuple ``(label, children)`` where every child is either
``LEAF`` or another tree.  Leaves are numbered 1..n in depth-first,
leftmost-first order; vertices are listed in the same traversal order
(root first), which is the canonical vertex order used everywhere.
"""
from typing import NamedTuple

LEAF = None


def corolla(label, arity):
    return (label, (LEAF,) * arity)


def leaf_count(t):
    if t is LEAF:
        return 1
    return sum(leaf_count(c) for c in t[1])


def vertex_count(t):
    if t is LEAF:
        return 0
    return 1 + sum(vertex_count(c) for c in t[1])


def labels(t):
    """Vertex labels in canonical (preorder) order."""
    out = []

    def walk(s):
        if s is LEAF:
            return
        out.append(s[0])
        for c in s[1]:
            walk(c)

    walk(t)
    return out


def structure(t):
    """Per preorder vertex: (parent index or -1, leg number, arity)."""
    out = []

    def walk(s, parent, leg):
        idx = len(out)
        out.append((parent, leg, len(s[1])))
        for j, c in enumerate(s[1], 1):
            if c is not LEAF:
                walk(c, idx, j)

    walk(t, -1, 0)
    return out


def vertices_before_leaf(t, i):
    """Number of vertices preceding leaf ``i`` in the canonical traversal."""
    count = 1
    seen = 0

    def walk(s):
        nonlocal count, seen
        for c in s[1]:
            if c is LEAF:
                seen += 1
                if seen == i:
                    return True
            else:
                count += 1
                if walk(c):
                    return True
        return False

    if not walk(t):
        raise IndexError(f"leaf {i} out of range")
    return count


def graft(t1, i, t2):
    """Graft the root of ``t2`` onto leaf ``i`` of ``t1``."""
    n = leaf_count(t1)
    if not 1 <= i <= n:
        raise IndexError(f"leaf index {i} out of range 1..{n}")
    state = [0]

    def walk(s):
        kids = []
        for c in s[1]:
            if c is LEAF:
                state[0] += 1
                kids.append(t2 if state[0] == i else LEAF)
            elif state[0] >= i:
                kids.append(c)
            else:
                kids.append(walk(c))
        return (s[0], tuple(kids))

    return walk(t1)


def relabel(t, fn):
    if t is LEAF:
        return LEAF
    return (fn(t[0]), tuple(relabel(c, fn) for c in t[1]))


def koszul_reorder_sign(degrees, perm):
    """Sign of reordering graded symbols.

    ``perm`` lists the old positions in their new order, i.e. the new
    sequence is ``[degrees[k] for k in perm]``.
    """
    n = len(degrees)
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise ValueError("perm is not a permutation of the degree indices")
    odd = 0
    for a in range(n):
        da = degrees[perm[a]] & 1
        if not da:
            continue
        for b in range(a + 1, n):
            if perm[a] > perm[b] and degrees[perm[b]] & 1:
                odd ^= 1
    return -1 if odd else 1


class OrderedTree(NamedTuple):
    tree: tuple
    # order[k] is b(v) for the k-th vertex in canonical order, values 1..n
    order: tuple


def canonical_order(t):
    if isinstance(t, OrderedTree):
        t = t.tree
    return OrderedTree(t, tuple(range(1, vertex_count(t) + 1)))


class TreeCompositionError(ValueError):
    pass


def effective_order(ot):
    """Canonical vertex indices in the order tree_compose actually composes them.

    Each step takes, among the vertices adjacent to the part already built,
    the one with the smallest ``order`` value.
    """
    t, order = ot
    info = structure(t)
    done = {0}
    seq = [0]
    while len(seq) < len(info):
        best = min((k for k in range(len(info)) if k not in done and info[k][0] in done),
                   key=lambda k: order[k])
        seq.append(best)
        done.add(best)
    return seq


def tree_compose(ot, decorations, composer, signature=None):
    """Evaluate ``T_b(p_1, ..., p_n)``.

    ``decorations[k]`` decorates the k-th vertex in canonical order and
    ``composer(a, l, b)`` is the partial composition ``a o_l b``.  The
    optional ``signature(p) -> (out, inputs)`` enables arity and colour
    checks.
    """
    t, order = ot
    info = structure(t)
    n = len(info)
    if len(decorations) != n or sorted(order) != list(range(1, n + 1)):
        raise TreeCompositionError("order/decorations do not match the vertices")
    if signature is not None:
        for k, (parent, leg, ar) in enumerate(info):
            out, ins = signature(decorations[k])
            if len(ins) != ar:
                raise TreeCompositionError(f"vertex {k + 1} has arity {ar}, decoration has {len(ins)}")
            if parent >= 0:
                pin = signature(decorations[parent])[1][leg - 1]
                if pin != out:
                    raise TreeCompositionError(
                        f"colour mismatch on the edge into vertex {k + 1}: {pin} vs {out}")
    current = decorations[0]
    legs = [(0, j) for j in range(1, info[0][2] + 1)]
    done = {0}
    for _ in range(n - 1):
        best = None
        for k in range(n):
            if k not in done and info[k][0] in done:
                if best is None or order[k] < order[best]:
                    best = k
        pos = legs.index((info[best][0], info[best][1]))
        current = composer(current, pos + 1, decorations[best])
        legs[pos:pos + 1] = [(best, j) for j in range(1, info[best][2] + 1)]
        done.add(best)
    return current


def enumerate_shapes(max_vertices, arities=(2,)):
    """All tree shapes (labels = arity) with 1..max_vertices vertices."""
    memo = {}

    def shapes(v):
        # trees with exactly v vertices
        if v in memo:
            return memo[v]
        out = []
        for a in arities:
            for kids in _distribute(a, v - 1, shapes):
                out.append((a, kids))
        memo[v] = out
        return out

    res = []
    for v in range(1, max_vertices + 1):
        res.extend(shapes(v))
    return res


def _distribute(slots, budget, shapes):
    if slots == 0:
        if budget == 0:
            yield ()
        return
    if budget == 0:
        yield (LEAF,) * slots
        return
    for first in range(0, budget + 1):
        heads = [LEAF] if first == 0 else shapes(first)
        for h in heads:
            for rest in _distribute(slots - 1, budget - first, shapes):
                yield (h,) + rest
