# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled occupation-sweep and union-find kernels.

Mirrors ``_kernels_py`` step for step: same counter RNG, same partial
Fisher-Yates draws, same union-by-size tie policy, so outputs are
bit-identical across the two backends.  Keep the two files in sync.
"""

import numpy as np

from libc.string cimport memcpy, memset

cdef extern from *:
    """
    #include <stdint.h>
    typedef unsigned long long u64;
    typedef unsigned __int128 pl_u128;
    static inline u64 pl_mulhi64(u64 a, u64 b) {
        return (u64)(((pl_u128)a * (pl_u128)b) >> 64);
    }
    static inline u64 pl_mix64(u64 x) {
        x ^= x >> 30; x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27; x *= 0x94D049BB133111EBULL;
        x ^= x >> 31; return x;
    }
    """
    ctypedef unsigned long long u64
    u64 pl_mulhi64(u64 a, u64 b) noexcept nogil
    u64 pl_mix64(u64 x) noexcept nogil

cdef u64 GOLDEN = 0x9E3779B97F4A7C15ULL

BACKEND = "compiled"


cdef inline u64 draw(u64* state, u64 bound) noexcept nogil:
    state[0] += GOLDEN
    return pl_mulhi64(pl_mix64(state[0]), bound)


cdef inline int find(int* parent, int x) noexcept nogil:
    cdef int root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


cdef inline int find_disp(int* parent, long long* off, int ndim, int x,
                          long long* carry) noexcept nogil:
    cdef int root = x, cur, nxt, a
    cdef long long old
    while parent[root] != root:
        root = parent[root]
    for a in range(ndim):
        carry[a] = 0
    cur = x
    while parent[cur] != cur:
        for a in range(ndim):
            carry[a] += off[cur * ndim + a]
        cur = parent[cur]
    cur = x
    while parent[cur] != cur:
        nxt = parent[cur]
        for a in range(ndim):
            old = off[cur * ndim + a]
            off[cur * ndim + a] = carry[a]
            carry[a] -= old
        parent[cur] = root
        cur = nxt
    return root


def components_site(long long[::1] indptr, int[::1] indices,
                    const unsigned char[::1] open_mask, int[::1] labels):
    cdef int n = indptr.shape[0] - 1
    cdef int[::1] parent = np.arange(n, dtype=np.int32)
    cdef int[::1] size = np.ones(n, dtype=np.int32)
    cdef int v, u, rv, ru
    cdef long long e
    with nogil:
        for v in range(n):
            if not open_mask[v]:
                continue
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if u > v and open_mask[u]:
                    rv = find(&parent[0], v)
                    ru = find(&parent[0], u)
                    if rv != ru:
                        if size[rv] < size[ru]:
                            rv, ru = ru, rv
                        parent[ru] = rv
                        size[rv] += size[ru]
        for v in range(n):
            labels[v] = find(&parent[0], v) if open_mask[v] else -1


def components_bond(int[::1] edge_u, int[::1] edge_v, long long n_vertices,
                    const unsigned char[::1] open_edges, int[::1] labels):
    cdef int n = <int> n_vertices
    cdef int[::1] parent = np.arange(n, dtype=np.int32)
    cdef int[::1] size = np.ones(n, dtype=np.int32)
    cdef long long e, m_edges = edge_u.shape[0]
    cdef int rv, ru, v
    with nogil:
        for e in range(m_edges):
            if not open_edges[e]:
                continue
            rv = find(&parent[0], edge_u[e])
            ru = find(&parent[0], edge_v[e])
            if rv != ru:
                if size[rv] < size[ru]:
                    rv, ru = ru, rv
                parent[ru] = rv
                size[rv] += size[ru]
        for v in range(n):
            labels[v] = find(&parent[0], v)


def nz_reach_site(long long[::1] indptr, int[::1] indices,
                  const unsigned char[::1] far_mask, long long origin,
                  int n_events, unsigned long long[::1] run_seeds,
                  int[:, ::1] mstar):
    cdef int m_sites = indptr.shape[0] - 1
    cdef int org = <int> origin
    cdef int all_bits = (1 << n_events) - 1
    cdef int[::1] iota = np.arange(m_sites, dtype=np.int32)
    cdef int[::1] perm = np.empty(m_sites, dtype=np.int32)
    cdef int[::1] parent = np.empty(m_sites, dtype=np.int32)
    cdef int[::1] size = np.empty(m_sites, dtype=np.int32)
    cdef unsigned char[::1] mask = np.empty(m_sites, dtype=np.uint8)
    cdef unsigned char[::1] occupied = np.empty(m_sites, dtype=np.uint8)
    cdef long long run, n_runs = run_seeds.shape[0], e
    cdef u64 state
    cdef int m, j, v, u, rv, ru, fired, new, b
    with nogil:
        for run in range(n_runs):
            state = run_seeds[run]
            memcpy(&perm[0], &iota[0], m_sites * sizeof(int))
            memset(&occupied[0], 0, m_sites)
            fired = 0
            for b in range(n_events):
                mstar[run, b] = m_sites + 1
            for m in range(m_sites):
                j = m + <int> draw(&state, <u64> (m_sites - m))
                v = perm[j]
                perm[j] = perm[m]
                perm[m] = v
                occupied[v] = 1
                parent[v] = v
                size[v] = 1
                mask[v] = far_mask[v]
                for e in range(indptr[v], indptr[v + 1]):
                    u = indices[e]
                    if occupied[u]:
                        rv = find(&parent[0], v)
                        ru = find(&parent[0], u)
                        if rv != ru:
                            if size[rv] < size[ru]:
                                rv, ru = ru, rv
                            parent[ru] = rv
                            size[rv] += size[ru]
                            mask[rv] = mask[rv] | mask[ru]
                if occupied[org]:
                    new = mask[find(&parent[0], org)] & all_bits & ~fired
                    if new:
                        for b in range(n_events):
                            if new & (1 << b):
                                mstar[run, b] = m + 1
                        fired = fired | new
                        if fired == all_bits:
                            break


def nz_wrap_site(long long[::1] indptr, int[::1] indices,
                 const short[:, ::1] disp, unsigned long long[::1] run_seeds,
                 int[::1] mstar):
    cdef int m_sites = indptr.shape[0] - 1
    cdef int ndim = disp.shape[1]
    cdef int[::1] iota = np.arange(m_sites, dtype=np.int32)
    cdef int[::1] perm = np.empty(m_sites, dtype=np.int32)
    cdef int[::1] parent = np.empty(m_sites, dtype=np.int32)
    cdef int[::1] size = np.empty(m_sites, dtype=np.int32)
    cdef unsigned char[::1] occupied = np.empty(m_sites, dtype=np.uint8)
    cdef long long[::1] off = np.empty(m_sites * ndim, dtype=np.int64)
    cdef long long[::1] carry = np.empty(ndim, dtype=np.int64)
    cdef long long run, n_runs = run_seeds.shape[0], e, ebase
    cdef u64 state
    cdef int m, j, v, u, rv, ru, a, base_v, ub, hit
    cdef bint wrapped
    with nogil:
        for run in range(n_runs):
            state = run_seeds[run]
            memcpy(&perm[0], &iota[0], m_sites * sizeof(int))
            memset(&occupied[0], 0, m_sites)
            hit = m_sites + 1
            for m in range(m_sites):
                j = m + <int> draw(&state, <u64> (m_sites - m))
                v = perm[j]
                perm[j] = perm[m]
                perm[m] = v
                occupied[v] = 1
                parent[v] = v
                size[v] = 1
                base_v = v * ndim
                for a in range(ndim):
                    off[base_v + a] = 0
                wrapped = False
                for e in range(indptr[v], indptr[v + 1]):
                    u = indices[e]
                    if not occupied[u]:
                        continue
                    rv = find_disp(&parent[0], &off[0], ndim, v, &carry[0])
                    ru = find_disp(&parent[0], &off[0], ndim, u, &carry[0])
                    ebase = e * ndim
                    ub = u * ndim
                    if rv == ru:
                        for a in range(ndim):
                            if off[ub + a] - off[base_v + a] != disp[e, a]:
                                wrapped = True
                                break
                        if wrapped:
                            break
                    elif size[rv] < size[ru]:
                        parent[rv] = ru
                        size[ru] += size[rv]
                        for a in range(ndim):
                            off[rv * ndim + a] = off[ub + a] - disp[e, a] - off[base_v + a]
                    else:
                        parent[ru] = rv
                        size[rv] += size[ru]
                        for a in range(ndim):
                            off[ru * ndim + a] = off[base_v + a] + disp[e, a] - off[ub + a]
                if wrapped:
                    hit = m + 1
                    break
            mstar[run] = hit


def nz_face_site(long long[::1] indptr, int[::1] indices,
                 const unsigned char[::1] face_mask,
                 unsigned long long[::1] run_seeds, int[::1] mstar):
    cdef int m_sites = indptr.shape[0] - 1
    cdef int[::1] iota = np.arange(m_sites, dtype=np.int32)
    cdef int[::1] perm = np.empty(m_sites, dtype=np.int32)
    cdef int[::1] parent = np.empty(m_sites, dtype=np.int32)
    cdef int[::1] size = np.empty(m_sites, dtype=np.int32)
    cdef unsigned char[::1] mask = np.empty(m_sites, dtype=np.uint8)
    cdef unsigned char[::1] occupied = np.empty(m_sites, dtype=np.uint8)
    cdef long long run, n_runs = run_seeds.shape[0], e
    cdef u64 state
    cdef int m, j, v, u, rv, ru, hit
    with nogil:
        for run in range(n_runs):
            state = run_seeds[run]
            memcpy(&perm[0], &iota[0], m_sites * sizeof(int))
            memset(&occupied[0], 0, m_sites)
            hit = m_sites + 1
            for m in range(m_sites):
                j = m + <int> draw(&state, <u64> (m_sites - m))
                v = perm[j]
                perm[j] = perm[m]
                perm[m] = v
                occupied[v] = 1
                parent[v] = v
                size[v] = 1
                mask[v] = face_mask[v]
                rv = v
                for e in range(indptr[v], indptr[v + 1]):
                    u = indices[e]
                    if occupied[u]:
                        rv = find(&parent[0], rv)
                        ru = find(&parent[0], u)
                        if rv != ru:
                            if size[rv] < size[ru]:
                                rv, ru = ru, rv
                            parent[ru] = rv
                            size[rv] += size[ru]
                            mask[rv] = mask[rv] | mask[ru]
                if mask[find(&parent[0], v)] == 3:
                    hit = m + 1
                    break
            mstar[run] = hit


def nz_reach_bond(int[::1] edge_u, int[::1] edge_v, long long n_vertices,
                  const unsigned char[::1] far_mask, long long origin,
                  int n_events, unsigned long long[::1] run_seeds,
                  int[:, ::1] mstar):
    cdef int n = <int> n_vertices
    cdef int m_edges = <int> edge_u.shape[0]
    cdef int org = <int> origin
    cdef int all_bits = (1 << n_events) - 1
    cdef int[::1] iota_e = np.arange(m_edges, dtype=np.int32)
    cdef int[::1] iota_v = np.arange(n, dtype=np.int32)
    cdef int[::1] ones = np.ones(n, dtype=np.int32)
    cdef int[::1] perm = np.empty(m_edges, dtype=np.int32)
    cdef int[::1] parent = np.empty(n, dtype=np.int32)
    cdef int[::1] size = np.empty(n, dtype=np.int32)
    cdef unsigned char[::1] mask = np.empty(n, dtype=np.uint8)
    cdef long long run, n_runs = run_seeds.shape[0]
    cdef u64 state
    cdef int m, j, e, rv, ru, fired, new, b
    with nogil:
        for run in range(n_runs):
            state = run_seeds[run]
            memcpy(&perm[0], &iota_e[0], m_edges * sizeof(int))
            memcpy(&parent[0], &iota_v[0], n * sizeof(int))
            memcpy(&size[0], &ones[0], n * sizeof(int))
            memcpy(&mask[0], &far_mask[0], n)
            fired = 0
            for b in range(n_events):
                mstar[run, b] = m_edges + 1
            for m in range(m_edges):
                j = m + <int> draw(&state, <u64> (m_edges - m))
                e = perm[j]
                perm[j] = perm[m]
                perm[m] = e
                rv = find(&parent[0], edge_u[e])
                ru = find(&parent[0], edge_v[e])
                if rv != ru:
                    if size[rv] < size[ru]:
                        rv, ru = ru, rv
                    parent[ru] = rv
                    size[rv] += size[ru]
                    mask[rv] = mask[rv] | mask[ru]
                new = mask[find(&parent[0], org)] & all_bits & ~fired
                if new:
                    for b in range(n_events):
                        if new & (1 << b):
                            mstar[run, b] = m + 1
                    fired = fired | new
                    if fired == all_bits:
                        break


def nz_wrap_bond(int[::1] edge_u, int[::1] edge_v, long long n_vertices,
                 const short[:, ::1] disp, unsigned long long[::1] run_seeds,
                 int[::1] mstar):
    cdef int n = <int> n_vertices
    cdef int m_edges = <int> edge_u.shape[0]
    cdef int ndim = disp.shape[1]
    cdef int[::1] iota_e = np.arange(m_edges, dtype=np.int32)
    cdef int[::1] iota_v = np.arange(n, dtype=np.int32)
    cdef int[::1] ones = np.ones(n, dtype=np.int32)
    cdef int[::1] perm = np.empty(m_edges, dtype=np.int32)
    cdef int[::1] parent = np.empty(n, dtype=np.int32)
    cdef int[::1] size = np.empty(n, dtype=np.int32)
    cdef long long[::1] off = np.empty(n * ndim, dtype=np.int64)
    cdef long long[::1] carry = np.empty(ndim, dtype=np.int64)
    cdef long long run, n_runs = run_seeds.shape[0], ebase
    cdef u64 state
    cdef int m, j, e, v, u, rv, ru, a, vb, ub, hit
    cdef bint wrapped
    with nogil:
        for run in range(n_runs):
            state = run_seeds[run]
            memcpy(&perm[0], &iota_e[0], m_edges * sizeof(int))
            memcpy(&parent[0], &iota_v[0], n * sizeof(int))
            memcpy(&size[0], &ones[0], n * sizeof(int))
            memset(&off[0], 0, n * ndim * sizeof(long long))
            hit = m_edges + 1
            for m in range(m_edges):
                j = m + <int> draw(&state, <u64> (m_edges - m))
                e = perm[j]
                perm[j] = perm[m]
                perm[m] = e
                v = edge_u[e]
                u = edge_v[e]
                rv = find_disp(&parent[0], &off[0], ndim, v, &carry[0])
                ru = find_disp(&parent[0], &off[0], ndim, u, &carry[0])
                vb = v * ndim
                ub = u * ndim
                if rv == ru:
                    wrapped = False
                    for a in range(ndim):
                        if off[ub + a] - off[vb + a] != disp[e, a]:
                            wrapped = True
                            break
                    if wrapped:
                        hit = m + 1
                        break
                elif size[rv] < size[ru]:
                    parent[rv] = ru
                    size[ru] += size[rv]
                    for a in range(ndim):
                        off[rv * ndim + a] = off[ub + a] - disp[e, a] - off[vb + a]
                else:
                    parent[ru] = rv
                    size[rv] += size[ru]
                    for a in range(ndim):
                        off[ru * ndim + a] = off[vb + a] + disp[e, a] - off[ub + a]
            mstar[run] = hit


def nz_face_bond(int[::1] edge_u, int[::1] edge_v, long long n_vertices,
                 const unsigned char[::1] face_mask,
                 unsigned long long[::1] run_seeds, int[::1] mstar):
    cdef int n = <int> n_vertices
    cdef int m_edges = <int> edge_u.shape[0]
    cdef int[::1] iota_e = np.arange(m_edges, dtype=np.int32)
    cdef int[::1] iota_v = np.arange(n, dtype=np.int32)
    cdef int[::1] ones = np.ones(n, dtype=np.int32)
    cdef int[::1] perm = np.empty(m_edges, dtype=np.int32)
    cdef int[::1] parent = np.empty(n, dtype=np.int32)
    cdef int[::1] size = np.empty(n, dtype=np.int32)
    cdef unsigned char[::1] mask = np.empty(n, dtype=np.uint8)
    cdef long long run, n_runs = run_seeds.shape[0]
    cdef u64 state
    cdef int m, j, e, rv, ru, hit
    with nogil:
        for run in range(n_runs):
            state = run_seeds[run]
            memcpy(&perm[0], &iota_e[0], m_edges * sizeof(int))
            memcpy(&parent[0], &iota_v[0], n * sizeof(int))
            memcpy(&size[0], &ones[0], n * sizeof(int))
            memcpy(&mask[0], &face_mask[0], n)
            hit = m_edges + 1
            for m in range(m_edges):
                j = m + <int> draw(&state, <u64> (m_edges - m))
                e = perm[j]
                perm[j] = perm[m]
                perm[m] = e
                rv = find(&parent[0], edge_u[e])
                ru = find(&parent[0], edge_v[e])
                if rv != ru:
                    if size[rv] < size[ru]:
                        rv, ru = ru, rv
                    parent[ru] = rv
                    size[rv] += size[ru]
                    mask[rv] = mask[rv] | mask[ru]
                    if mask[rv] == 3:
                        hit = m + 1
                        break
            mstar[run] = hit
