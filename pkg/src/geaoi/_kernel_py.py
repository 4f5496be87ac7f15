"""Vectorized numpy cycle kernel, used when the compiled extension is absent.

Each row of ``u`` holds three uniforms for one cycle: service draw, idle-wait
draw, chain-transition draw.  Rows ``[0, n_full)`` are full cycles; a trailing
row beyond ``n_full`` only contributes the service time that closes the last
cycle.  ``acc`` is updated in place:

    0 sum Q_j   1 sum Y_j   2 sum B_j   3 sum D_j   4 max Q_j   5 max B_j
    6 cycles in bad state   7 closed cycles   8 pending flag   9/10 pending S, Z

``Q_j = Y_j^2/2 + Y_j S_{j+1}`` is the area between consecutive generation
instants; ``B_j = S_j D_j + D_j^2/2`` with ``D_j = Z_j + S_{j+1}`` is the
sawtooth area between consecutive deliveries.
"""

from __future__ import annotations

import numpy as np

ACC_SIZE = 11


def chain_states(u_trans: np.ndarray, state: int, p: float, q: float) -> tuple[np.ndarray, int]:
    """States at entry of each row and the state after the last row.

    A draw below min(p, q) flips either state, one at or above max(p, q)
    keeps it, and one in between sends both states to the same value, so the
    path is a scan over "last reset" positions plus flip parity.
    """
    n = len(u_trans)
    if n == 0:
        return np.empty(0, dtype=np.int8), state
    lo, hi = min(p, q), max(p, q)
    flip = u_trans < lo
    reset = (u_trans >= lo) & (u_trans < hi)
    reset_to = 1 if p > q else 0
    flipcum = np.cumsum(flip)
    last = np.maximum.accumulate(np.where(reset, np.arange(n), -1))
    has_reset = last >= 0
    base = np.where(has_reset, reset_to, state)
    flips_before = np.where(has_reset, flipcum[np.maximum(last, 0)], 0)
    after = (base ^ ((flipcum - flips_before) & 1)).astype(np.int8)
    entry = np.empty(n, dtype=np.int8)
    entry[0] = state
    entry[1:] = after[:-1]
    return entry, int(after[-1])


def run_chunk(u, n_full, state, p, q, svc_b, svc_g, arr_b, arr_g, acc):
    u = np.asarray(u)
    m = u.shape[0]
    entry, final = chain_states(u[:n_full, 2], state, p, q)
    states = np.empty(m, dtype=np.int8)
    states[:n_full] = entry
    states[n_full:] = final
    s_all = -np.log1p(-u[:, 0]) / np.where(states == 0, svc_b, svc_g)
    z_full = -np.log1p(-u[:n_full, 1]) / np.where(entry == 0, arr_b, arr_g)

    pend = acc[8] != 0.0
    if pend:
        cur_s = np.concatenate(([acc[9]], s_all[:n_full]))
        cur_z = np.concatenate(([acc[10]], z_full))
        off = 0
    else:
        cur_s, cur_z, off = s_all[:n_full], z_full, 1
    count = max(0, min(len(cur_s), m - off))
    nxt = s_all[off:off + count]
    s_c, z_c = cur_s[:count], cur_z[:count]
    y = s_c + z_c
    d = z_c + nxt
    area_q = 0.5 * y * y + y * nxt
    area_b = s_c * d + 0.5 * d * d
    if count:
        acc[0] += area_q.sum()
        acc[1] += y.sum()
        acc[2] += area_b.sum()
        acc[3] += d.sum()
        acc[4] = max(acc[4], area_q.max())
        acc[5] = max(acc[5], area_b.max())
    acc[6] += np.count_nonzero(entry == 0)
    acc[7] += count
    if len(cur_s) > count:
        acc[8], acc[9], acc[10] = 1.0, cur_s[-1], cur_z[-1]
    else:
        acc[8] = acc[9] = acc[10] = 0.0
    return final
