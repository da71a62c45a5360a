# cython: language_level=3, boundscheck=False, wraparound=False
# distutils: language = c++
"""Compiled bitmask kernels; same contract as ``_kernels_py``.

Masks wider than 64 bits fall back to the pure-Python kernels.
"""

from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

from causal_unfold import _kernels_py as _py

ctypedef unsigned long long u64

BACKEND = "cython"

cdef u64 LIMIT = 0xFFFFFFFFFFFFFFFF


cdef class MaskSet:
    cdef unordered_set[u64] small
    cdef public object big
    cdef public bint wide

    def __init__(self, masks):
        self.big = frozenset(masks)
        self.wide = False
        for m in self.big:
            if m > LIMIT:
                self.wide = True
                break
        if not self.wide:
            for m in self.big:
                self.small.insert(<u64>m)

    def __contains__(self, m):
        return m in self.big

    def __len__(self):
        return len(self.big)

    def __iter__(self):
        return iter(self.big)


cdef extern from *:
    int __builtin_popcountll(unsigned long long)


cdef inline int popcount(u64 x):
    return __builtin_popcountll(x)


cdef bint _fits(object below, object lbits):
    for b in below:
        if b > LIMIT:
            return False
    if lbits is not None:
        for b in lbits:
            if b > LIMIT:
                return False
    return len(below) <= 64


cdef vector[int] _topo(vector[u64]& below, u64 within):
    cdef vector[int] nodes
    cdef int i, j, n = below.size()
    for i in range(n):
        if (within >> i) & 1:
            nodes.push_back(i)
    # insertion sort by popcount, stable
    cdef int key, t
    for i in range(1, nodes.size()):
        t = nodes[i]
        key = popcount(below[t])
        j = i - 1
        while j >= 0 and popcount(below[nodes[j]]) > key:
            nodes[j + 1] = nodes[j]
            j -= 1
        nodes[j + 1] = t
    return nodes


cdef void _down_rec(vector[u64]& below, vector[int]& nodes, int k, u64 cur, vector[u64]& out):
    if k == <int>nodes.size():
        out.push_back(cur)
        return
    cdef int i = nodes[k]
    _down_rec(below, nodes, k + 1, cur, out)
    if below[i] & ~cur == 0:
        _down_rec(below, nodes, k + 1, cur | ((<u64>1) << i), out)


def down_sets(below, within):
    if not _fits(below, None) or within > LIMIT:
        return _py.down_sets(below, within)
    cdef vector[u64] b = below
    cdef vector[int] nodes = _topo(b, within)
    cdef vector[u64] out
    _down_rec(b, nodes, 0, 0, out)
    return [x for x in out]


cdef void _img_rec(vector[u64]& below, vector[u64]& lbits, vector[int]& nodes, int k,
                   u64 cur, u64 img, vector[u64]& out, vector[u64]& outimg):
    if k == <int>nodes.size():
        out.push_back(cur)
        outimg.push_back(img)
        return
    cdef int i = nodes[k]
    _img_rec(below, lbits, nodes, k + 1, cur, img, out, outimg)
    if below[i] & ~cur == 0:
        _img_rec(below, lbits, nodes, k + 1, cur | ((<u64>1) << i), img | lbits[i], out, outimg)


def downset_images(below, lbits, within):
    if not _fits(below, lbits) or within > LIMIT:
        return _py.downset_images(below, lbits, within)
    cdef vector[u64] b = below
    cdef vector[u64] lb = lbits
    cdef vector[int] nodes = _topo(b, within)
    cdef vector[u64] out
    cdef vector[u64] outimg
    _img_rec(b, lb, nodes, 0, 0, 0, out, outimg)
    return [(out[i], outimg[i]) for i in range(out.size())]


cdef bint _all_in_rec(vector[u64]& below, vector[u64]& lbits, vector[int]& nodes, int k,
                      u64 cur, u64 img, unordered_set[u64]& fam):
    if k == <int>nodes.size():
        return fam.count(img) > 0
    cdef int i = nodes[k]
    if not _all_in_rec(below, lbits, nodes, k + 1, cur, img, fam):
        return False
    if below[i] & ~cur == 0:
        return _all_in_rec(below, lbits, nodes, k + 1, cur | ((<u64>1) << i), img | lbits[i], fam)
    return True


def images_all_in(below, lbits, within, MaskSet fam):
    if fam.wide or not _fits(below, lbits) or within > LIMIT:
        return _py.images_all_in(below, lbits, within, fam.big)
    cdef vector[u64] b = below
    cdef vector[u64] lb = lbits
    cdef vector[int] nodes = _topo(b, within)
    return _all_in_rec(b, lb, nodes, 0, 0, 0, fam.small)


def clause_i_ok(below, lbits, MaskSet fam):
    if fam.wide or not _fits(below, lbits):
        return _py.clause_i_ok(below, lbits, fam.big)
    cdef vector[u64] b = below
    cdef vector[u64] lb = lbits
    cdef vector[int] nodes
    cdef vector[u64] out
    cdef vector[u64] outimg
    cdef int i, j
    cdef u64 past
    for i in range(b.size()):
        past = b[i]
        nodes = _topo(b, past)
        out.clear()
        outimg.clear()
        _img_rec(b, lb, nodes, 0, 0, 0, out, outimg)
        for j in range(out.size()):
            if out[j] != past and fam.small.count(outimg[j] | lb[i]) > 0:
                return False
    return True


def union_violations(configs, MaskSet fam):
    if fam.wide:
        return _py.union_violations(configs, fam.big)
    for c in configs:
        if c > LIMIT:
            return _py.union_violations(configs, fam.big)
    cdef vector[u64] cs = configs
    cdef int n = cs.size()
    cdef int i, j, k
    cdef u64 u
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            u = cs[i] | cs[j]
            if fam.small.count(u) > 0:
                continue
            for k in range(n):
                if u & ~cs[k] == 0:
                    out.append((i, j))
                    break
    return out
