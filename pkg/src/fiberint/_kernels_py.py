"""Pure-Python term kernels.

A term dictionary maps ``(exponents, differentials)`` to a coefficient.
``exponents`` is a tuple of non-negative ints, ``differentials`` a strictly
increasing tuple of variable indices.  Both this module and the compiled
``_kernels`` extension expose the same three functions.
"""


def merge_differentials(d1, d2):
    """Return ``(sign, merged)`` for ``dx_{d1} ^ dx_{d2}``, or ``None`` if zero."""
    if not d1:
        return 1, d2
    if not d2:
        return 1, d1
    merged = []
    inversions = 0
    i = j = 0
    n1, n2 = len(d1), len(d2)
    while i < n1 and j < n2:
        a, b = d1[i], d2[j]
        if a == b:
            return None
        if a < b:
            merged.append(a)
            i += 1
        else:
            # b jumps over the remaining n1 - i entries of d1
            inversions += n1 - i
            merged.append(b)
            j += 1
    merged.extend(d1[i:])
    merged.extend(d2[j:])
    return (-1 if inversions & 1 else 1), tuple(merged)


def wedge_terms(a, b):
    out = {}
    for (e1, d1), c1 in a.items():
        for (e2, d2), c2 in b.items():
            m = merge_differentials(d1, d2)
            if m is None:
                continue
            sign, dd = m
            key = (tuple([x + y for x, y in zip(e1, e2)]), dd)
            val = c1 * c2
            if sign < 0:
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


def d_terms(a, nvars):
    """Exterior derivative in the first ``nvars`` exponent slots."""
    out = {}
    for (e, d), c in a.items():
        for v in range(nvars):
            k = e[v]
            if k == 0 or v in d:
                continue
            pos = 0
            while pos < len(d) and d[pos] < v:
                pos += 1
            dd = d[:pos] + (v,) + d[pos:]
            ee = e[:v] + (k - 1,) + e[v + 1:]
            val = c * k
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
