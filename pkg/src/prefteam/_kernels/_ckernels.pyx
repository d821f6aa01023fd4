# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled team-lattice kernels; same entry points as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

cnp.import_array()

DEF OP_BOT = 0
DEF OP_TOP = 1
DEF OP_LIT = 2
DEF OP_DEP = 3
DEF OP_INC = 4
DEF OP_AND = 5
DEF OP_OR_COVER = 6
DEF OP_OR_PARTITION = 7
DEF OP_OR_UNION = 8


cdef void _cover(const uint8_t[:] a, const uint8_t[:] b, uint8_t[:] out,
                 int64_t[:] ys, int64_t[:] zs) noexcept nogil:
    cdef Py_ssize_t size = a.shape[0], ny = 0, nz = 0, i, j, x
    cdef int64_t y
    for x in range(size):
        out[x] = 0
        if a[x]:
            ys[ny] = x
            ny += 1
        if b[x]:
            zs[nz] = x
            nz += 1
    for i in range(ny):
        y = ys[i]
        for j in range(nz):
            out[y | zs[j]] = 1


cdef void _partition(const uint8_t[:] a, const uint8_t[:] b, uint8_t[:] out,
                     int64_t[:] ys, int64_t[:] zs) noexcept nogil:
    cdef Py_ssize_t size = a.shape[0], ny = 0, nz = 0, i, j, x
    cdef int64_t y, z, submask_steps = 1
    for x in range(size):
        out[x] = 0
        if a[x]:
            ys[ny] = x
            ny += 1
        if b[x]:
            zs[nz] = x
            nz += 1
    x = size
    while x > 1:
        submask_steps *= 3
        x >>= 1
    if ny * nz <= submask_steps:
        # sparse: disjoint pairs directly
        for i in range(ny):
            y = ys[i]
            for j in range(nz):
                z = zs[j]
                if not (y & z):
                    out[y | z] = 1
        return
    # dense: X is covered iff some Y in a has X \ Y in b
    for x in range(size):
        y = x
        while True:
            if a[y] and b[x ^ y]:
                out[x] = 1
                break
            if y == 0:
                break
            y = (y - 1) & x


cdef void _max_subteam(const uint8_t[:] f, int64_t[:] g, int m) noexcept nogil:
    cdef Py_ssize_t size = f.shape[0], x
    cdef int bit
    for x in range(size):
        g[x] = x if f[x] else 0
    for bit in range(m):
        for x in range(size):
            if (x >> bit) & 1:
                g[x] |= g[x ^ (1 << bit)]


cdef void _union(const uint8_t[:] a, const uint8_t[:] b, uint8_t[:] out,
                 int64_t[:] ga, int64_t[:] gb, int m) noexcept nogil:
    cdef Py_ssize_t size = a.shape[0], x
    _max_subteam(a, ga, m)
    _max_subteam(b, gb, m)
    for x in range(size):
        out[x] = 1 if (ga[x] | gb[x]) == x else 0


def or_cover(a, b):
    cdef cnp.ndarray[uint8_t] aa = np.ascontiguousarray(a, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t] bb = np.ascontiguousarray(b, dtype=np.uint8)
    out = np.zeros(len(aa), dtype=np.uint8)
    ys = np.empty(len(aa), dtype=np.int64)
    zs = np.empty(len(aa), dtype=np.int64)
    _cover(aa, bb, out, ys, zs)
    return out


def or_partition(a, b):
    cdef cnp.ndarray[uint8_t] aa = np.ascontiguousarray(a, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t] bb = np.ascontiguousarray(b, dtype=np.uint8)
    out = np.zeros(len(aa), dtype=np.uint8)
    ys = np.empty(len(aa), dtype=np.int64)
    zs = np.empty(len(aa), dtype=np.int64)
    _partition(aa, bb, out, ys, zs)
    return out


def max_subteam(f, int m):
    cdef cnp.ndarray[uint8_t] ff = np.ascontiguousarray(f, dtype=np.uint8)
    g = np.empty(len(ff), dtype=np.int64)
    _max_subteam(ff, g, m)
    return g


def or_union(a, b, int m):
    cdef cnp.ndarray[uint8_t] aa = np.ascontiguousarray(a, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t] bb = np.ascontiguousarray(b, dtype=np.uint8)
    out = np.zeros(len(aa), dtype=np.uint8)
    ga = np.empty(len(aa), dtype=np.int64)
    gb = np.empty(len(aa), dtype=np.int64)
    _union(aa, bb, out, ga, gb, m)
    return out


def strict_down_exists(f, int m):
    cdef cnp.ndarray[uint8_t] ff = np.ascontiguousarray(f, dtype=np.uint8)
    cdef uint8_t[:] h = ff.copy()
    cdef Py_ssize_t size = ff.shape[0], x
    cdef int bit
    out = np.zeros(size, dtype=np.uint8)
    cdef uint8_t[:] o = out
    for bit in range(m):
        for x in range(size):
            if (x >> bit) & 1:
                h[x] |= h[x ^ (1 << bit)]
    for x in range(size):
        for bit in range(m):
            if (x >> bit) & 1 and h[x ^ (1 << bit)]:
                o[x] = 1
                break
    return out


def strict_up_exists(f, int m):
    cdef cnp.ndarray[uint8_t] ff = np.ascontiguousarray(f, dtype=np.uint8)
    cdef uint8_t[:] h = ff.copy()
    cdef Py_ssize_t size = ff.shape[0], x
    cdef int bit
    out = np.zeros(size, dtype=np.uint8)
    cdef uint8_t[:] o = out
    for bit in range(m):
        for x in range(size):
            if not (x >> bit) & 1:
                h[x] |= h[x | (1 << bit)]
    for x in range(size):
        for bit in range(m):
            if not (x >> bit) & 1 and h[x | (1 << bit)]:
                o[x] = 1
                break
    return out


def eval_program(ops, lit_masks, dep_table, dep_groups, inc_table, inc_lv, inc_rv, int m):
    cdef int64_t[:, :] code = np.ascontiguousarray(ops, dtype=np.int64).reshape(-1, 4)
    cdef int64_t[:] lits = np.ascontiguousarray(lit_masks, dtype=np.int64)
    cdef int64_t[:, :] deps = np.ascontiguousarray(dep_table, dtype=np.int64).reshape(-1, 3)
    cdef int64_t[:] groups = np.ascontiguousarray(dep_groups, dtype=np.int64)
    cdef int64_t[:] incs = np.ascontiguousarray(inc_table, dtype=np.int64)
    cdef int64_t[:] lv = np.ascontiguousarray(inc_lv, dtype=np.int64)
    cdef int64_t[:] rv = np.ascontiguousarray(inc_rv, dtype=np.int64)
    cdef Py_ssize_t k = code.shape[0], size = 1 << m, x, i, g
    cdef Py_ssize_t step
    cdef int64_t op, left, right, aux, mask, tpos, part, off, cnt
    cdef uint64_t lhs, rhs
    cdef bint ok
    values = np.zeros((k, size), dtype=np.uint8)
    cdef uint8_t[:, :] val = values
    cdef int64_t[:] s1 = np.empty(size, dtype=np.int64)
    cdef int64_t[:] s2 = np.empty(size, dtype=np.int64)

    for step in range(k):
        op = code[step, 0]
        left = code[step, 1]
        right = code[step, 2]
        aux = code[step, 3]
        with nogil:
            if op == OP_BOT:
                val[step, 0] = 1
            elif op == OP_TOP:
                for x in range(size):
                    val[step, x] = 1
            elif op == OP_LIT:
                mask = lits[aux]
                for x in range(size):
                    val[step, x] = 1 if (x & ~mask) == 0 else 0
            elif op == OP_DEP:
                tpos = deps[aux, 0]
                off = deps[aux, 1]
                cnt = deps[aux, 2]
                for x in range(size):
                    ok = True
                    for g in range(off, off + cnt):
                        part = x & groups[g]
                        if (part & tpos) != 0 and (part & ~tpos) != 0:
                            ok = False
                            break
                    val[step, x] = ok
            elif op == OP_INC:
                off = incs[aux]
                for x in range(size):
                    lhs = 0
                    rhs = 0
                    for i in range(m):
                        if (x >> i) & 1:
                            lhs |= (<uint64_t>1) << lv[off + i]
                            rhs |= (<uint64_t>1) << rv[off + i]
                    val[step, x] = 1 if (lhs & ~rhs) == 0 else 0
            elif op == OP_AND:
                for x in range(size):
                    val[step, x] = val[left, x] & val[right, x]
            elif op == OP_OR_COVER:
                _cover(val[left], val[right], val[step], s1, s2)
            elif op == OP_OR_PARTITION:
                _partition(val[left], val[right], val[step], s1, s2)
            elif op == OP_OR_UNION:
                _union(val[left], val[right], val[step], s1, s2, m)
        if op < OP_BOT or op > OP_OR_UNION:
            raise ValueError(f"bad opcode {op}")
    return values[k - 1].copy()
