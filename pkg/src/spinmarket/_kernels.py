"""Compiled hot loops: spin updates, cluster labeling, RNG primitives.

Everything here is numba nopython code operating on flat arrays. The RNG
is the same splitmix64 stream as :mod:`spinmarket.rng`; all 64-bit
arithmetic wraps modulo 2^64. Keep constants typed uint64 throughout,
mixed signed/unsigned promotion would silently produce floats.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True, inline="always")
def _mix(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def heat_bath_probability(h, beta):
    """P(next spin = +1) = 1 / (1 + exp(-2 beta h)), overflow-safe.

    Saturates to exact 0.0 / 1.0 once 2*beta*h leaves the exponent range
    of a double instead of overflowing exp. The negative branch is the
    complement of the positive one, so p(h) + p(-h) == 1.0 exactly in
    floating point.
    """
    x = 2.0 * beta * h
    if x >= 0.0:
        if x > 709.0:
            return 1.0
        return 1.0 / (1.0 + np.exp(-x))
    if x < -709.0:
        return 0.0
    return 1.0 - 1.0 / (1.0 + np.exp(x))


@njit(cache=True, nogil=True)
def run_window(spins, nbr, coupling, alpha, betas, mag_sum, rng_state,
               refresh_per_sweep, record_every, phase, ref_spins, out_mag, out_same):
    """Advance the lattice by ``len(betas)`` sweeps.

    One sweep = P single-site heat-bath attempts, sites drawn uniformly
    with replacement, new state written immediately (serial asynchronous
    update). ``betas[k]`` is the inverse temperature of sweep k. The
    minority field uses |M| tracked incrementally after every accepted
    flip, or frozen at the last sweep boundary when ``refresh_per_sweep``.

    When ``record_every > 0``, after every sweep whose global index
    (``phase`` sweeps happened before this window) is a multiple of
    record_every, the magnetization sum and the count of sites equal to
    ``ref_spins`` are stored (then ref_spins is reset to the current
    configuration), giving the per-record magnetization and
    unchanged-fraction series.

    Returns (mag_sum, rng_state); ``spins`` and ``ref_spins`` mutate.
    """
    n = spins.shape[0]
    p_u = U64(n)
    inv_p = 1.0 / n
    m_abs = abs(mag_sum) * inv_p
    rec = 0
    for i_sweep in range(betas.shape[0]):
        two_beta = 2.0 * betas[i_sweep]
        for _ in range(n):
            rng_state = rng_state + GOLDEN
            site = np.int64(_mix(rng_state) % p_u)
            s_old = spins[site]
            nbsum = (spins[nbr[site, 0]] + spins[nbr[site, 1]]
                     + spins[nbr[site, 2]] + spins[nbr[site, 3]])
            if not refresh_per_sweep:
                m_abs = abs(mag_sum) * inv_p
            h = coupling * nbsum - alpha * s_old * m_abs
            x = two_beta * h
            if x >= 0.0:
                p_up = 1.0 if x > 709.0 else 1.0 / (1.0 + np.exp(-x))
            elif x < -709.0:
                p_up = 0.0
            else:
                p_up = 1.0 - 1.0 / (1.0 + np.exp(x))
            rng_state = rng_state + GOLDEN
            u = (_mix(rng_state) >> U64(11)) * _INV_2_53
            s_new = np.int8(1) if u < p_up else np.int8(-1)
            if s_new != s_old:
                spins[site] = s_new
                mag_sum += 2 * np.int64(s_new)
        if refresh_per_sweep:
            m_abs = abs(mag_sum) * inv_p
        if record_every > 0 and (phase + i_sweep + 1) % record_every == 0:
            same = 0
            for j in range(n):
                if spins[j] == ref_spins[j]:
                    same += 1
                ref_spins[j] = spins[j]
            out_mag[rec] = mag_sum
            out_same[rec] = same
            rec += 1
    return mag_sum, rng_state


@njit(cache=True, nogil=True, inline="always")
def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(cache=True, nogil=True)
def label_sites(spins, side):
    """Union-find labeling of same-sign 4-connected clusters on the torus.

    Returns (labels, sizes, signs): labels maps each site to a compact
    cluster id; ids are assigned in order of each cluster's smallest site
    index, which makes them deterministic and gives lowest-id tie-breaks
    for free downstream.
    """
    p = side * side
    parent = np.arange(p, dtype=np.int32)
    rank = np.zeros(p, dtype=np.int32)
    for y in range(side):
        base = y * side
        down_base = ((y + 1) % side) * side
        for x in range(side):
            i = base + x
            s = spins[i]
            j = base + (x + 1) % side
            if spins[j] == s:
                ri = _find(parent, i)
                rj = _find(parent, j)
                if ri != rj:
                    if rank[ri] < rank[rj]:
                        ri, rj = rj, ri
                    parent[rj] = ri
                    if rank[ri] == rank[rj]:
                        rank[ri] += 1
            j = down_base + x
            if spins[j] == s:
                ri = _find(parent, i)
                rj = _find(parent, j)
                if ri != rj:
                    if rank[ri] < rank[rj]:
                        ri, rj = rj, ri
                    parent[rj] = ri
                    if rank[ri] == rank[rj]:
                        rank[ri] += 1
    labels = np.empty(p, dtype=np.int32)
    compact = np.full(p, -1, dtype=np.int32)
    n_clusters = 0
    for i in range(p):
        r = _find(parent, i)
        if compact[r] < 0:
            compact[r] = n_clusters
            n_clusters += 1
        labels[i] = compact[r]
    sizes = np.zeros(n_clusters, dtype=np.int64)
    signs = np.zeros(n_clusters, dtype=np.int8)
    for i in range(p):
        lab = labels[i]
        sizes[lab] += 1
        signs[lab] = spins[i]
    return labels, sizes, signs


@njit(cache=True, nogil=True)
def random_spins(seed_state, n):
    """n spins of +-1 from the stream, one draw per site (top bit).

    Returns (spins, new_state); consumes exactly n outputs.
    """
    spins = np.empty(n, dtype=np.int8)
    state = seed_state
    for i in range(n):
        state = state + GOLDEN
        spins[i] = np.int8(1) if (_mix(state) >> U64(63)) else np.int8(-1)
    return spins, state
