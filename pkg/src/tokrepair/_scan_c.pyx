# cython: boundscheck=False, wraparound=False
"""Compiled token scanner; algorithm-identical to tokrepair._scan_py."""

MODE_FIX = 0
MODE_LOC = 1


cdef inline bint _is_word(Py_UCS4 ch):
    return (u"a" <= ch <= u"z") or (u"A" <= ch <= u"Z") or \
           (u"0" <= ch <= u"9") or ch == u"_" or ch == u"$"


cdef inline bint _is_upper(Py_UCS4 ch):
    return u"A" <= ch <= u"Z"


cdef inline bint _is_lower(Py_UCS4 ch):
    return u"a" <= ch <= u"z"


cdef inline bint _is_alpha(Py_UCS4 ch):
    return _is_upper(ch) or _is_lower(ch)


cdef inline bint _is_digit(Py_UCS4 ch):
    return u"0" <= ch <= u"9"


cdef void _split_word(unicode s, Py_ssize_t start, Py_ssize_t end, list out):
    cdef Py_ssize_t k = start, m
    cdef Py_UCS4 ch
    while k < end:
        ch = s[k]
        if ch == u"_" or ch == u"$":
            out.append((k, k + 1))
            k += 1
        elif _is_digit(ch):
            m = k + 1
            while m < end and _is_digit(s[m]):
                m += 1
            out.append((k, m))
            k = m
        else:
            m = k + 1
            while m < end and _is_alpha(s[m]):
                if _is_upper(s[m]) and (
                    _is_lower(s[m - 1])
                    or (_is_upper(s[m - 1]) and m + 1 < end and _is_lower(s[m + 1]))
                ):
                    break
                m += 1
            out.append((k, m))
            k = m


def scan(unicode source, int mode):
    """Return token spans [(start, end), ...] for *source* under *mode*."""
    cdef list out = []
    cdef Py_ssize_t n = len(source)
    cdef Py_ssize_t i = 0, j
    cdef Py_UCS4 ch
    while i < n:
        ch = source[i]
        if ch == u"\n":
            out.append((i, i + 1))
            i += 1
        elif ch == u" " or ch == u"\t" or ch == u"\r" or ch == u"\x0b" or ch == u"\x0c":
            i += 1
        elif _is_word(ch):
            j = i + 1
            while j < n and _is_word(source[j]):
                j += 1
            if mode == MODE_FIX:
                out.append((i, j))
            else:
                _split_word(source, i, j, out)
            i = j
        else:
            out.append((i, i + 1))
            i += 1
    return out
