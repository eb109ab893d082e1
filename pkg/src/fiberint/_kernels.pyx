# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernels; same contract as ``_kernels_py``."""


cpdef object merge_differentials(tuple d1, tuple d2):
    cdef Py_ssize_t i = 0, j = 0, n1 = len(d1), n2 = len(d2)
    cdef long a, b
    cdef long inversions = 0
    cdef list merged
    if n1 == 0:
        return 1, d2
    if n2 == 0:
        return 1, d1
    merged = []
    while i < n1 and j < n2:
        a = d1[i]
        b = d2[j]
        if a == b:
            return None
        if a < b:
            merged.append(a)
            i += 1
        else:
            inversions += n1 - i
            merged.append(b)
            j += 1
    while i < n1:
        merged.append(d1[i])
        i += 1
    while j < n2:
        merged.append(d2[j])
        j += 1
    return (-1 if inversions & 1 else 1), tuple(merged)


cpdef dict wedge_terms(dict a, dict b):
    cdef dict out = {}
    cdef tuple k1, k2, e1, e2, d1, d2, key
    cdef Py_ssize_t n, idx
    cdef object c1, c2, val, prev, m
    cdef list ee
    for k1, c1 in a.items():
        e1 = k1[0]
        d1 = k1[1]
        n = len(e1)
        for k2, c2 in b.items():
            e2 = k2[0]
            d2 = k2[1]
            m = merge_differentials(d1, d2)
            if m is None:
                continue
            ee = [0] * n
            for idx in range(n):
                ee[idx] = <long>e1[idx] + <long>e2[idx]
            key = (tuple(ee), m[1])
            val = c1 * c2
            if m[0] < 0:
                val = -val
            prev = out.get(key)
            if prev is None:
                out[key] = val
            else:
                val = prev + val
                if val:
                    out[key] = val
                else:
                    del out[key]
    return out


cpdef dict d_terms(dict a, long nvars):
    cdef dict out = {}
    cdef tuple k, e, d, dd, ee, key
    cdef long v, kk, pos, nd
    cdef object c, val, prev
    for k, c in a.items():
        e = k[0]
        d = k[1]
        nd = len(d)
        for v in range(nvars):
            kk = e[v]
            if kk == 0 or v in d:
                continue
            pos = 0
            while pos < nd and <long>d[pos] < v:
                pos += 1
            dd = d[:pos] + (v,) + d[pos:]
            ee = e[:v] + (kk - 1,) + e[v + 1:]
            val = c * kk
            if pos & 1:
                val = -val
            key = (ee, dd)
            prev = out.get(key)
            if prev is None:
                out[key] = val
            else:
                val = prev + val
                if val:
                    out[key] = val
                else:
                    del out[key]
    return out
