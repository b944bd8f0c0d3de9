# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contract as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.string cimport memcmp, memcpy

from ._pykernels import ClosureLimitExceeded, GEN, COMPOSE, ADD, MULT

cnp.import_array()


cdef struct Store:
    int n              # points per transformation
    int count
    int capacity
    int *data          # count * n
    int *table         # hash slots, -1 = empty
    int mask


cdef int store_init(Store *s, int n, int capacity) except -1:
    cdef int slots = 16
    s.n = n
    s.count = 0
    s.capacity = capacity
    s.data = <int *> malloc(sizeof(int) * n * capacity if n * capacity > 0 else sizeof(int))
    while slots < 2 * capacity:
        slots <<= 1
    s.table = <int *> malloc(sizeof(int) * slots)
    s.mask = slots - 1
    if s.data == NULL or s.table == NULL:
        raise MemoryError()
    for i in range(slots):
        s.table[i] = -1
    return 0


cdef void store_free(Store *s):
    free(s.data)
    free(s.table)


cdef inline unsigned long long row_hash(int *row, int n) nogil:
    cdef unsigned long long h = 1469598103934665603ULL
    cdef int i
    for i in range(n):
        h ^= <unsigned long long> row[i]
        h *= 1099511628211ULL
    return h


cdef int store_add(Store *s, int *row) except -2:
    """Insert ``row``; returns its index and -1 if it was new (index = count-1)."""
    cdef unsigned long long h = row_hash(row, s.n)
    cdef int slot = <int> (h & s.mask)
    cdef int idx
    while True:
        idx = s.table[slot]
        if idx < 0:
            break
        if memcmp(s.data + idx * s.n, row, sizeof(int) * s.n) == 0:
            return idx
        slot = (slot + 1) & s.mask
    if s.count >= s.capacity:
        raise ClosureLimitExceeded(s.capacity)
    memcpy(s.data + s.count * s.n, row, sizeof(int) * s.n)
    s.table[slot] = s.count
    s.count += 1
    return -1


cdef object store_rows(Store *s):
    out = []
    cdef int i, j
    for i in range(s.count):
        out.append(tuple([s.data[i * s.n + j] for j in range(s.n)]))
    return out


def monoid_closure(gens, int limit=20000):
    gens = [tuple(t) for t in gens]
    if not gens:
        return [], []
    cdef int n = len(gens[0])
    cdef Store s
    cdef int i, j, k, r, gp
    cdef int *row = <int *> malloc(sizeof(int) * max(n, 1))
    cdef int *g
    cdef int ngen = len(gens)
    cdef int *gen_pos = <int *> malloc(sizeof(int) * ngen)
    parents = []
    store_init(&s, n, limit)
    try:
        for k in range(ngen):
            for j in range(n):
                row[j] = gens[k][j]
            r = store_add(&s, row)
            if r < 0:
                parents.append((GEN, k, -1))
                gen_pos[k] = s.count - 1
            else:
                gen_pos[k] = r
        i = 0
        while i < s.count:
            for k in range(ngen):
                gp = gen_pos[k]
                g = s.data + gp * n
                for j in range(n):
                    row[j] = g[s.data[i * n + j]]
                r = store_add(&s, row)
                if r < 0:
                    parents.append((COMPOSE, gp, i))
            i += 1
        return store_rows(&s), parents
    finally:
        free(row)
        free(gen_pos)
        store_free(&s)


def closure(gens, add=None, bint compose=True, bint pointwise_add=False,
            bint multiples=False, int limit=20000):
    if (pointwise_add or multiples) and add is None:
        raise ValueError("an addition table is required")
    gens = [tuple(t) for t in gens]
    if not gens:
        return [], []
    cdef int n = len(gens[0])
    cdef int h = 0
    cdef cnp.int32_t[:, ::1] addt
    if add is not None:
        arr = np.ascontiguousarray(np.asarray(add, dtype=np.int32))
        h = arr.shape[0]
        addt = arr
    cdef Store s
    cdef int i, j, k, m
    cdef int *row = <int *> malloc(sizeof(int) * max(n, 1))
    cdef int *cur = <int *> malloc(sizeof(int) * max(n, 1))
    cdef int *x
    cdef int *y
    parents = []
    store_init(&s, n, limit)
    try:
        for k in range(len(gens)):
            for j in range(n):
                row[j] = gens[k][j]
            if store_add(&s, row) < 0:
                parents.append((GEN, k, -1))
        k = 0
        while k < s.count:
            if multiples:
                # the cycle of multiples can be longer than |H|; track it in a set
                memcpy(cur, s.data + k * n, sizeof(int) * n)
                seen = {tuple([cur[j] for j in range(n)])}
                m = 1
                while True:
                    x = s.data + k * n
                    for j in range(n):
                        cur[j] = addt[cur[j], x[j]]
                    m += 1
                    key = tuple([cur[j] for j in range(n)])
                    if key in seen:
                        break
                    seen.add(key)
                    if store_add(&s, cur) < 0:
                        parents.append((MULT, m, k))
            for i in range(k + 1):
                # s.data may not move (fixed capacity), pointers stay valid
                x = s.data + k * n
                y = s.data + i * n
                if compose:
                    for j in range(n):
                        row[j] = x[y[j]]
                    if store_add(&s, row) < 0:
                        parents.append((COMPOSE, k, i))
                    x = s.data + k * n
                    y = s.data + i * n
                    for j in range(n):
                        row[j] = y[x[j]]
                    if store_add(&s, row) < 0:
                        parents.append((COMPOSE, i, k))
                if pointwise_add:
                    x = s.data + k * n
                    y = s.data + i * n
                    for j in range(n):
                        row[j] = addt[x[j], y[j]]
                    if store_add(&s, row) < 0:
                        parents.append((ADD, k, i))
                    x = s.data + k * n
                    y = s.data + i * n
                    for j in range(n):
                        row[j] = addt[y[j], x[j]]
                    if store_add(&s, row) < 0:
                        parents.append((ADD, i, k))
            k += 1
        return store_rows(&s), parents
    finally:
        free(row)
        free(cur)
        store_free(&s)


def eval_flat(node_img, parent, act, add, int zero):
    cdef cnp.int32_t[::1] img = np.ascontiguousarray(node_img, dtype=np.int32)
    cdef cnp.int32_t[::1] par = np.ascontiguousarray(parent, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] actt = np.ascontiguousarray(act, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] addt = np.ascontiguousarray(add, dtype=np.int32)
    cdef Py_ssize_t n = img.shape[0]
    acc_arr = np.full(n, zero, dtype=np.int32)
    cdef cnp.int32_t[::1] acc = acc_arr
    cdef int total = zero
    cdef int tv, p
    cdef Py_ssize_t i
    for i in range(n - 1, -1, -1):
        tv = actt[img[i], acc[i]]
        p = par[i]
        if p >= 0:
            acc[p] = addt[tv, acc[p]]
        else:
            total = addt[tv, total]
    return acc_arr, total
