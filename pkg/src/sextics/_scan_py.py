"""Pure-Python kernel scans (reference implementation of the compiled ones)."""
from __future__ import annotations

import itertools


def scan_cyclic(weights, p: int) -> list[tuple[int, ...]]:
    """Nonzero a in (Z/p)^c generating a good order-p subgroup.

    ``weights[i]`` is N_i: p^2 times the min norm of a*g_i equals a(p-a)N_i.
    An element is good when its total is = 0 mod 2p^2 (isotropic) and no
    multiple t*a has total exactly 2p^2 (no new root).
    """
    c = len(weights)
    target = 2 * p * p
    out = []
    for a in itertools.product(range(p), repeat=c):
        if not any(a):
            continue
        w = 0
        for ai, n in zip(a, weights):
            w += ai * (p - ai) * n
        if w % target:
            continue
        ok = True
        for t in range(1, (p + 1) // 2):
            wt = 0
            for ai, n in zip(a, weights):
                b = (t * ai) % p
                wt += b * (p - b) * n
            if wt == target:
                ok = False
                break
        if ok:
            out.append(a)
    return out
