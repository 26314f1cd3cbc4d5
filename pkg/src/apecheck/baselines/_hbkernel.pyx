# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of the pure-Python reachability kernel (same algorithm)."""
from libc.stdlib cimport malloc, free


def reach_batch(int[:] indptr, int[:] indices, int[:] src, int[:] dst, signed char[:] out):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t q = src.shape[0]
    cdef int *mark = <int *> malloc((n + 1) * sizeof(int))
    cdef int *stack = <int *> malloc((n + 1) * sizeof(int))
    cdef Py_ssize_t k = 0, end, i, j, top
    cdef int s, u, v, bound, stamp = 0
    if mark == NULL or stack == NULL:
        free(mark)
        free(stack)
        raise MemoryError()
    try:
        for i in range(n):
            mark[i] = -1
        while k < q:
            s = src[k]
            end = k
            bound = dst[k]
            while end < q and src[end] == s:
                if dst[end] > bound:
                    bound = dst[end]
                end += 1
            stamp += 1
            mark[s] = stamp
            top = 0
            stack[top] = s
            top += 1
            while top > 0:
                top -= 1
                u = stack[top]
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if v <= bound and mark[v] != stamp:
                        mark[v] = stamp
                        stack[top] = v
                        top += 1
            for i in range(k, end):
                out[i] = 1 if mark[dst[i]] == stamp else 0
            k = end
    finally:
        free(mark)
        free(stack)
    return out
