"""Jitted inner loops for the heat-bath dynamics.

Layout conventions shared with `heatbath`:

* a configuration is an int64 matrix ``W[path, column]`` with column 0 at
  lattice time -T_N (path 0 is the top path);
* ``p_int[path, column]`` is the up-move probability at interior columns;
* ``q_lo[path, a]`` / ``q_hi[path, a]`` are the up-move probabilities at the
  two end columns as a function of the neighbour's current height ``a``
  (the boundary-potential gradient depends on it);
* ``fixed`` selects the site-draw convention: when True the drawn site index
  is shifted by +1 so draws cover only the interior columns 1..L-2.

Block drivers return ``(status, j)``: status 0 = block completed (j = -1);
status 1 = a boundary table was too short at draw index j (the caller treats
this as an error — tables are sized far above any reachable height);
status 2 = pathwise order between stacked chains failed at draw index j
(multi-chain driver only).
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def run_block(W, floor_lat, ceil_lat, p_int, q_lo, q_hi, fixed,
              k_arr, i_arr, u_arr, counts, snap_every, snaps, snap_base):
    """Apply a block of elementary updates to one chain.

    counts accumulates [accepted, rejected, frozen].  When snap_every > 0 a
    snapshot of W is written to snaps[snap_base + r] after every snap_every
    updates (r = 0, 1, ...).
    """
    n, L = W.shape
    H = q_lo.shape[1]
    nrec = 0
    for j in range(k_arr.shape[0]):
        k = k_arr[j]
        i = i_arr[j]
        u = u_arr[j]
        if fixed:
            k += 1
        frozen = False
        wp = np.int64(0)
        if k == 0 or k == L - 1:
            if k == 0:
                a = W[i, 1]
                if a >= H:
                    return 1, j
                q = q_lo[i, a]
            else:
                a = W[i, L - 2]
                if a >= H:
                    return 1, j
                q = q_hi[i, a]
            wp = a + 1 if u <= q else a - 1
        else:
            wl = W[i, k - 1]
            if wl != W[i, k + 1]:
                counts[2] += 1
                frozen = True
            else:
                wp = wl + 1 if u <= p_int[i, k] else wl - 1
        if not frozen:
            lo = floor_lat[k] if i == n - 1 else W[i + 1, k] + 1
            hi = ceil_lat[k] if i == 0 else W[i - 1, k] - 1
            if lo <= wp and wp <= hi:
                W[i, k] = wp
                counts[0] += 1
            else:
                counts[1] += 1
        if snap_every > 0 and (j + 1) % snap_every == 0:
            r = snap_base + nrec
            for ii in range(n):
                for kk in range(L):
                    snaps[r, ii, kk] = np.int32(W[ii, kk])
            nrec += 1
    return 0, np.int64(-1)


@njit(cache=True, nogil=True)
def run_block_multi(W, floor_lat, ceil_lat, p_int, q_lo, q_hi, fixed,
                    k_arr, i_arr, u_arr):
    """Apply one block of shared-randomness updates to m stacked chains.

    W has shape (m, n, L); per-chain tables are stacked along axis 0.  After
    each elementary update the consecutive order W[c] <= W[c+1] is checked at
    the updated site — the only place a fresh violation can appear.
    """
    m, n, L = W.shape
    H = q_lo.shape[2]
    for j in range(k_arr.shape[0]):
        k = k_arr[j]
        i = i_arr[j]
        u = u_arr[j]
        if fixed:
            k += 1
        for c in range(m):
            frozen = False
            wp = np.int64(0)
            if k == 0 or k == L - 1:
                if k == 0:
                    a = W[c, i, 1]
                    if a >= H:
                        return 1, j
                    q = q_lo[c, i, a]
                else:
                    a = W[c, i, L - 2]
                    if a >= H:
                        return 1, j
                    q = q_hi[c, i, a]
                wp = a + 1 if u <= q else a - 1
            else:
                wl = W[c, i, k - 1]
                if wl != W[c, i, k + 1]:
                    frozen = True
                else:
                    wp = wl + 1 if u <= p_int[c, i, k] else wl - 1
            if not frozen:
                lo = floor_lat[c, k] if i == n - 1 else W[c, i + 1, k] + 1
                hi = ceil_lat[c, k] if i == 0 else W[c, i - 1, k] - 1
                if lo <= wp and wp <= hi:
                    W[c, i, k] = wp
        for c in range(m - 1):
            if W[c, i, k] > W[c + 1, i, k]:
                return 2, j
    return 0, np.int64(-1)
