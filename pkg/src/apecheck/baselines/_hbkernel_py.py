"""Pure-Python reachability kernel over a time-ordered DAG in CSR form.

Node ids follow execution order and every edge points forward in time, so a
search for dst never needs to expand nodes with an id above dst.
"""


def reach_batch(indptr, indices, src, dst, out):
    """out[k] = 1 iff dst[k] is reachable from src[k] (or equal to it).

    Queries must be grouped by source; each group costs one bounded DFS.
    """
    n = len(indptr) - 1
    mark = [-1] * n
    q = len(src)
    k = 0
    stamp = 0
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
        stack = [s]
        while stack:
            u = stack.pop()
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if v <= bound and mark[v] != stamp:
                    mark[v] = stamp
                    stack.append(v)
        for i in range(k, end):
            out[i] = 1 if mark[dst[i]] == stamp else 0
        k = end
    return out
