"""In-place numba kernels for dense density-matrix updates.

Qubit ``q`` of an ``n``-qubit register is the bit ``1 << (n - 1 - q)`` of a
basis index (qubit 0 is the most significant bit). Every kernel mutates its
``rho`` argument and touches each matrix element once, which keeps the
12-qubit (4096 x 4096) case memory-bound rather than allocation-bound.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def conj_1q(rho, m, mask):
    """rho <- M rho M^dagger with M a 2x2 matrix acting on the qubit ``mask``."""
    d = rho.shape[0]
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    c00, c01, c10, c11 = np.conj(m00), np.conj(m01), np.conj(m10), np.conj(m11)
    for r0 in range(d):
        if r0 & mask:
            continue
        r1 = r0 | mask
        for c0 in range(d):
            if c0 & mask:
                continue
            c1 = c0 | mask
            a = rho[r0, c0]
            b = rho[r0, c1]
            c = rho[r1, c0]
            e = rho[r1, c1]
            x0 = m00 * a + m01 * c
            x1 = m00 * b + m01 * e
            y0 = m10 * a + m11 * c
            y1 = m10 * b + m11 * e
            rho[r0, c0] = x0 * c00 + x1 * c01
            rho[r0, c1] = x0 * c10 + x1 * c11
            rho[r1, c0] = y0 * c00 + y1 * c01
            rho[r1, c1] = y0 * c10 + y1 * c11


@njit(cache=True)
def _compress(x, hi, lo):
    # drop bits hi and lo (hi > lo) from x
    low = x & (lo - 1)
    mid = (x >> 1) & ((hi >> 1) - 1) & ~(lo - 1)
    high = (x >> 2) & ~((hi >> 1) - 1)
    return high | mid | low


@njit(cache=True)
def pair_trace(rho, ma, mb):
    """Partial trace over the two qubits ``ma``, ``mb`` (masks)."""
    d = rho.shape[0]
    hi = max(ma, mb)
    lo = min(ma, mb)
    dr = d // 4
    # expand[x] inserts zero bits at hi and lo into a reduced index x
    expand = np.empty(dr, dtype=np.int64)
    for x in range(dr):
        low = x & (lo - 1)
        rest = x ^ low
        mid = (rest << 1) & ((hi - 1) & ~(lo - 1))
        high = (rest << 2) & ~(hi | (hi - 1))
        expand[x] = high | mid | low
    out = np.zeros((dr, dr), dtype=rho.dtype)
    for ab in (0, lo, hi, lo | hi):
        for rr in range(dr):
            r = expand[rr] | ab
            for cc in range(dr):
                out[rr, cc] += rho[r, expand[cc] | ab]
    return out


@njit(cache=True)
def cnot_depolarize(rho, cmask, tmask, eps):
    """Conjugate by CNOT(control, target), then apply two-qubit depolarizing.

    The channel is rho -> (1 - eps) rho + eps * I/4 (x) Tr_pair(rho). It is
    self-adjoint and commutes with any unitary on the pair, so the same kernel
    propagates observables backwards.
    """
    d = rho.shape[0]
    hi = max(cmask, tmask)
    lo = min(cmask, tmask)
    both = hi | lo
    red = pair_trace(rho, cmask, tmask) if eps != 0.0 else np.zeros((1, 1), dtype=rho.dtype)
    keep = 1.0 - eps
    quarter = eps / 4.0
    for r in range(d):
        pr = r ^ tmask if r & cmask else r
        for c in range(d):
            pc = c ^ tmask if c & cmask else c
            # visit each swap orbit once
            if pr < r or (pr == r and pc < c):
                continue
            if pr == r and pc == c:
                v = rho[r, c] * keep
                if eps != 0.0 and (r & both) == (c & both):
                    v += quarter * red[_compress(r, hi, lo), _compress(c, hi, lo)]
                rho[r, c] = v
            else:
                a = rho[r, c]
                b = rho[pr, pc]
                a2 = b * keep
                b2 = a * keep
                if eps != 0.0:
                    if (r & both) == (c & both):
                        a2 += quarter * red[_compress(r, hi, lo), _compress(c, hi, lo)]
                    if (pr & both) == (pc & both):
                        b2 += quarter * red[_compress(pr, hi, lo), _compress(pc, hi, lo)]
                rho[r, c] = a2
                rho[pr, pc] = b2


@njit(cache=True)
def environment_1q(obs, rho, mask):
    """Contract everything but one qubit out of Tr(O U rho U^dagger).

    Returns T with Tr(O U rho U^dagger) = sum T[i,j,k,l] U[i,k] conj(U[j,l])
    for any 2x2 U on the qubit ``mask``. ``obs`` must be Hermitian.
    """
    d = rho.shape[0]
    t = np.zeros((2, 2, 2, 2), dtype=rho.dtype)
    for r0 in range(d):
        if r0 & mask:
            continue
        rs = (r0, r0 | mask)
        for c0 in range(d):
            if c0 & mask:
                continue
            cs = (c0, c0 | mask)
            for i in range(2):
                for j in range(2):
                    o = np.conj(obs[rs[i], cs[j]])
                    for k in range(2):
                        for l in range(2):
                            t[i, j, k, l] += o * rho[rs[k], cs[l]]
    return t
