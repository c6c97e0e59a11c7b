# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled maximum-clique kernel; word-parallel twin of ``_pure.max_clique``."""

import numpy as np

BACKEND = "cython"

cdef extern from *:
    """
    #include <stdint.h>
    static inline int homspace_ctz64(uint64_t x) { return __builtin_ctzll(x); }
    """
    int homspace_ctz64(unsigned long long x) nogil


cdef class _Search:
    cdef unsigned long long[:, ::1] nbr
    cdef unsigned long long[:, ::1] pbuf
    cdef unsigned long long[::1] rest, avail
    cdef int[:, ::1] order_buf, bound_buf
    cdef int[::1] best, cur
    cdef int n, nw, best_size, cur_size
    cdef long long nodes, budget
    cdef bint complete

    def __init__(self, nbr_words, int n, long long budget):
        self.nbr = nbr_words
        self.n = n
        self.nw = nbr_words.shape[1]
        self.budget = budget
        self.nodes = 0
        self.complete = True
        self.best_size = 0
        self.cur_size = 0
        self.pbuf = np.zeros((n + 1, self.nw), dtype=np.uint64)
        self.rest = np.zeros(self.nw, dtype=np.uint64)
        self.avail = np.zeros(self.nw, dtype=np.uint64)
        self.order_buf = np.zeros((n + 1, n), dtype=np.int32)
        self.bound_buf = np.zeros((n + 1, n), dtype=np.int32)
        self.best = np.zeros(n, dtype=np.int32)
        self.cur = np.zeros(n, dtype=np.int32)

    cdef void _expand(self, int level):
        cdef int m = 0, color = 0, v, idx, w, i
        cdef bint nonempty
        cdef unsigned long long word
        if not self.complete:
            return
        for w in range(self.nw):
            self.rest[w] = self.pbuf[level, w]
        while True:
            nonempty = False
            for w in range(self.nw):
                if self.rest[w]:
                    nonempty = True
                    break
            if not nonempty:
                break
            color += 1
            for w in range(self.nw):
                self.avail[w] = self.rest[w]
            while True:
                v = -1
                for w in range(self.nw):
                    word = self.avail[w]
                    if word:
                        v = 64 * w + homspace_ctz64(word)
                        break
                if v < 0:
                    break
                self.avail[v >> 6] &= self.avail[v >> 6] - 1
                for w in range(self.nw):
                    self.avail[w] &= ~self.nbr[v, w]
                self.rest[v >> 6] &= ~(<unsigned long long>1 << (v & 63))
                self.order_buf[level, m] = v
                self.bound_buf[level, m] = color
                m += 1
        for idx in range(m - 1, -1, -1):
            if self.cur_size + self.bound_buf[level, idx] <= self.best_size:
                return
            v = self.order_buf[level, idx]
            self.nodes += 1
            if self.budget >= 0 and self.nodes > self.budget:
                self.complete = False
                return
            self.cur[self.cur_size] = v
            self.cur_size += 1
            nonempty = False
            for w in range(self.nw):
                self.pbuf[level + 1, w] = self.pbuf[level, w] & self.nbr[v, w]
                if self.pbuf[level + 1, w]:
                    nonempty = True
            if nonempty:
                self._expand(level + 1)
                if not self.complete:
                    self.cur_size -= 1
                    return
            elif self.cur_size > self.best_size:
                self.best_size = self.cur_size
                for i in range(self.cur_size):
                    self.best[i] = self.cur[i]
            self.cur_size -= 1
            self.pbuf[level, v >> 6] &= ~(<unsigned long long>1 << (v & 63))


def max_clique(adj, budget=None):
    """Largest clique of the graph given as a boolean adjacency matrix.

    Same contract as the pure kernel: returns (members, complete, nodes).
    """
    adj = np.ascontiguousarray(adj, dtype=np.uint8)
    cdef int n = adj.shape[0]
    if n == 0:
        return [], True, 0
    cdef int nw = (n + 63) // 64
    padded = np.zeros((n, nw * 64), dtype=np.uint8)
    padded[:, :n] = adj
    words = np.ascontiguousarray(
        np.packbits(padded, axis=1, bitorder="little").view(np.uint64)
    )
    cdef _Search s = _Search(words, n, -1 if budget is None else int(budget))
    for w in range(nw):
        s.pbuf[0, w] = ~(<unsigned long long>0)
    if n & 63:
        s.pbuf[0, nw - 1] = (<unsigned long long>1 << (n & 63)) - 1
    s._expand(0)
    members = sorted(int(s.best[i]) for i in range(s.best_size))
    return members, bool(s.complete), int(s.nodes)
