"""Numpy implementation of the team-lattice kernels.

Families over a universe of ``m`` points are uint8 arrays of length ``2**m``
indexed by subset bitmask.  Used when the compiled extension is missing or
``PREFTEAM_PURE_PYTHON`` is set.
"""

import numpy as np

from prefteam._kernels.opcodes import (
    OP_AND,
    OP_BOT,
    OP_DEP,
    OP_INC,
    OP_LIT,
    OP_OR_COVER,
    OP_OR_PARTITION,
    OP_OR_UNION,
    OP_TOP,
)

_JOIN_CHUNK = 1 << 22


def _subsets(m):
    return np.arange(1 << m, dtype=np.int64)


def or_cover(a, b):
    """``{Y | Z : a[Y], b[Z]}``."""
    out = np.zeros(len(a), dtype=np.uint8)
    ys = np.flatnonzero(a)
    zs = np.flatnonzero(b)
    if len(ys) == 0 or len(zs) == 0:
        return out
    step = max(1, _JOIN_CHUNK // len(zs))
    for i in range(0, len(ys), step):
        out[(ys[i:i + step, None] | zs[None, :]).ravel()] = 1
    return out


def or_partition(a, b):
    """``{Y | Z : a[Y], b[Z], Y & Z == 0}``."""
    out = np.zeros(len(a), dtype=np.uint8)
    ys = np.flatnonzero(a)
    zs = np.flatnonzero(b)
    if len(ys) == 0 or len(zs) == 0:
        return out
    step = max(1, _JOIN_CHUNK // len(zs))
    for i in range(0, len(ys), step):
        y = ys[i:i + step, None]
        z = zs[None, :]
        out[(y | z)[(y & z) == 0]] = 1
    return out


def max_subteam(f, m):
    """For each X, the union of all members of ``f`` contained in X."""
    g = np.where(np.asarray(f, dtype=bool), _subsets(m), 0)
    for bit in range(m):
        view = g.reshape(-1, 2, 1 << bit)
        view[:, 1, :] |= view[:, 0, :]
    return g


def or_union(a, b, m):
    """X such that the maximal ``a``-subteam and ``b``-subteam of X cover X."""
    x = _subsets(m)
    return ((max_subteam(a, m) | max_subteam(b, m)) == x).astype(np.uint8)


def down_exists(f, m):
    """For each X: does ``f`` contain some Y with Y a subset of X."""
    g = np.asarray(f, dtype=bool).copy()
    for bit in range(m):
        view = g.reshape(-1, 2, 1 << bit)
        view[:, 1, :] |= view[:, 0, :]
    return g


def up_exists(f, m):
    """For each X: does ``f`` contain some Y with X a subset of Y."""
    g = np.asarray(f, dtype=bool).copy()
    for bit in range(m):
        view = g.reshape(-1, 2, 1 << bit)
        view[:, 0, :] |= view[:, 1, :]
    return g


def strict_down_exists(f, m):
    """For each X: does ``f`` contain a proper subset of X."""
    h = down_exists(f, m)
    x = _subsets(m)
    out = np.zeros(1 << m, dtype=bool)
    for bit in range(m):
        has = (x >> bit) & 1 == 1
        out[has] |= h[x[has] ^ (1 << bit)]
    return out.astype(np.uint8)


def strict_up_exists(f, m):
    """For each X: does ``f`` contain a proper superset of X."""
    h = up_exists(f, m)
    x = _subsets(m)
    out = np.zeros(1 << m, dtype=bool)
    for bit in range(m):
        lacks = (x >> bit) & 1 == 0
        out[lacks] |= h[x[lacks] | (1 << bit)]
    return out.astype(np.uint8)


def _lit(mask, m):
    x = _subsets(m)
    return ((x & ~np.int64(mask)) == 0).astype(np.uint8)


def _dep(tpos, groups, m):
    x = _subsets(m)
    ok = np.ones(1 << m, dtype=bool)
    tpos = np.int64(tpos)
    for g in groups:
        part = x & np.int64(g)
        ok &= ((part & tpos) == 0) | ((part & ~tpos) == 0)
    return ok.astype(np.uint8)


def _inc(lv, rv, m):
    x = _subsets(m)
    lhs = np.zeros(1 << m, dtype=np.int64)
    rhs = np.zeros(1 << m, dtype=np.int64)
    for i in range(m):
        present = (x >> i) & 1 == 1
        lhs[present] |= np.int64(1) << np.int64(lv[i])
        rhs[present] |= np.int64(1) << np.int64(rv[i])
    return ((lhs & ~rhs) == 0).astype(np.uint8)


def eval_program(ops, lit_masks, dep_table, dep_groups, inc_table, inc_lv, inc_rv, m):
    """Evaluate a compiled formula over every subset of an ``m``-point universe.

    Returns the family of the last instruction.
    """
    size = 1 << m
    values = []
    for op, left, right, aux in np.asarray(ops, dtype=np.int64).tolist():
        if op == OP_BOT:
            v = np.zeros(size, dtype=np.uint8)
            v[0] = 1
        elif op == OP_TOP:
            v = np.ones(size, dtype=np.uint8)
        elif op == OP_LIT:
            v = _lit(int(lit_masks[aux]), m)
        elif op == OP_DEP:
            tpos, off, cnt = (int(t) for t in dep_table[aux])
            v = _dep(tpos, [int(g) for g in dep_groups[off:off + cnt]], m)
        elif op == OP_INC:
            off = int(inc_table[aux])
            v = _inc(inc_lv[off:off + m], inc_rv[off:off + m], m)
        elif op == OP_AND:
            v = values[left] & values[right]
        elif op == OP_OR_COVER:
            v = or_cover(values[left], values[right])
        elif op == OP_OR_PARTITION:
            v = or_partition(values[left], values[right])
        elif op == OP_OR_UNION:
            v = or_union(values[left], values[right], m)
        else:
            raise ValueError(f"bad opcode {op}")
        values.append(v)
    return values[-1]
