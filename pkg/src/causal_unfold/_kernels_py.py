"""Pure-Python bitmask kernels.

Posets are given as ``below``: one strict-predecessor bitmask per node,
transitively closed. Families are sets of event bitmasks. The compiled
module ``_speedups`` implements the same functions with the same results.
"""

BACKEND = "python"


def MaskSet(masks):
    return frozenset(masks)


def _topo(below, within):
    nodes = [i for i in range(len(below)) if within >> i & 1]
    nodes.sort(key=lambda i: bin(below[i]).count("1"))
    return nodes


def down_sets(below, within):
    """All down-closed subsets of the (down-closed) node set ``within``."""
    nodes = _topo(below, within)
    out = []
    n = len(nodes)

    def rec(k, cur):
        if k == n:
            out.append(cur)
            return
        i = nodes[k]
        rec(k + 1, cur)
        if below[i] & ~cur == 0:
            rec(k + 1, cur | (1 << i))

    rec(0, 0)
    return out


def downset_images(below, lbits, within):
    """Pairs ``(downset, image)`` for every down-closed subset of ``within``."""
    nodes = _topo(below, within)
    out = []
    n = len(nodes)

    def rec(k, cur, img):
        if k == n:
            out.append((cur, img))
            return
        i = nodes[k]
        rec(k + 1, cur, img)
        if below[i] & ~cur == 0:
            rec(k + 1, cur | (1 << i), img | lbits[i])

    rec(0, 0, 0)
    return out


def images_all_in(below, lbits, within, fam):
    """True iff the label image of every down-set of ``within`` lies in ``fam``."""
    nodes = _topo(below, within)
    n = len(nodes)

    def rec(k, cur, img):
        if k == n:
            return img in fam
        i = nodes[k]
        if not rec(k + 1, cur, img):
            return False
        if below[i] & ~cur == 0:
            return rec(k + 1, cur | (1 << i), img | lbits[i])
        return True

    return rec(0, 0, 0)


def clause_i_ok(below, lbits, fam):
    """No node ``r`` has a proper down-set ``X`` of its strict past with
    ``image(X) + label(r)`` in ``fam``."""
    for i in range(len(below)):
        past = below[i]
        for x, img in downset_images(below, lbits, past):
            if x != past and (img | lbits[i]) in fam:
                return False
    return True


def union_violations(configs, fam):
    """Index pairs ``(i, j)`` of configurations with a common upper bound in
    ``configs`` whose union is missing from ``fam``."""
    out = []
    n = len(configs)
    for i in range(n):
        x = configs[i]
        for j in range(i + 1, n):
            u = x | configs[j]
            if u in fam:
                continue
            for z in configs:
                if u & ~z == 0:
                    out.append((i, j))
                    break
    return out
