"""Pure-Python occupation-sweep and union-find kernels.

Reference implementation of the hot loops; the compiled extension in
``_kernels.pyx`` mirrors every algorithm step for step (same counter RNG,
same partial Fisher-Yates draws, same union-by-size tie policy), so the two
backends produce bit-identical outputs and differ only in speed.  Keep the
two files in sync.

All sweeps record, per run, the first occupation count at which the tracked
monotone event holds (M + 1 when it never does).
"""

from __future__ import annotations

import numpy as np

from .rng import GOLDEN, MASK64, mix64

BACKEND = "python"


def _find(parent: list[int], x: int) -> int:
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def _find_disp(parent: list[int], off: list[int], ndim: int, x: int) -> int:
    """Find with path compression while keeping off[y] = pos(y) - pos(root)."""
    root = x
    while parent[root] != root:
        root = parent[root]
    cur = x
    carry = [0] * ndim
    while parent[cur] != cur:
        base = cur * ndim
        for a in range(ndim):
            carry[a] += off[base + a]
        cur = parent[cur]
    cur = x
    while parent[cur] != cur:
        nxt = parent[cur]
        base = cur * ndim
        for a in range(ndim):
            old = off[base + a]
            off[base + a] = carry[a]
            carry[a] -= old
        parent[cur] = root
        cur = nxt
    return root


def components_site(indptr, indices, open_mask, labels) -> None:
    """Root label per open vertex (-1 when closed), via union by size."""
    n = len(indptr) - 1
    indptr = indptr.tolist()
    indices = indices.tolist()
    is_open = open_mask.tolist()
    parent = list(range(n))
    size = [1] * n
    for v in range(n):
        if not is_open[v]:
            continue
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u > v and is_open[u]:
                rv = _find(parent, v)
                ru = _find(parent, u)
                if rv != ru:
                    if size[rv] < size[ru]:
                        rv, ru = ru, rv
                    parent[ru] = rv
                    size[rv] += size[ru]
    for v in range(n):
        labels[v] = _find(parent, v) if is_open[v] else -1


def components_bond(edge_u, edge_v, n_vertices, open_edges, labels) -> None:
    """Root label per vertex when the given bonds are open (all sites present)."""
    n = int(n_vertices)
    eu = edge_u.tolist()
    ev = edge_v.tolist()
    is_open = open_edges.tolist()
    parent = list(range(n))
    size = [1] * n
    for e in range(len(eu)):
        if not is_open[e]:
            continue
        rv = _find(parent, eu[e])
        ru = _find(parent, ev[e])
        if rv != ru:
            if size[rv] < size[ru]:
                rv, ru = ru, rv
            parent[ru] = rv
            size[rv] += size[ru]
    for v in range(n):
        labels[v] = _find(parent, v)


def _draw(state: int, bound: int) -> tuple[int, int]:
    """Advance the counter and map the word onto [0, bound)."""
    state = (state + GOLDEN) & MASK64
    return state, (mix64(state) * bound) >> 64


def nz_reach_site(indptr, indices, far_mask, origin, n_events, run_seeds, mstar) -> None:
    """Occupation sweep recording when the origin cluster first carries each
    distance bit of far_mask."""
    m_sites = len(indptr) - 1
    indptr = indptr.tolist()
    indices = indices.tolist()
    far = far_mask.tolist()
    origin = int(origin)
    all_bits = (1 << n_events) - 1
    for run in range(len(run_seeds)):
        state = int(run_seeds[run])
        perm = list(range(m_sites))
        parent = [0] * m_sites
        size = [0] * m_sites
        mask = [0] * m_sites
        occupied = bytearray(m_sites)
        fired = 0
        row = [m_sites + 1] * n_events
        for m in range(m_sites):
            state, j = _draw(state, m_sites - m)
            j += m
            v = perm[j]
            perm[j] = perm[m]
            perm[m] = v
            occupied[v] = 1
            parent[v] = v
            size[v] = 1
            mask[v] = far[v]
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if occupied[u]:
                    rv = _find(parent, v)
                    ru = _find(parent, u)
                    if rv != ru:
                        if size[rv] < size[ru]:
                            rv, ru = ru, rv
                        parent[ru] = rv
                        size[rv] += size[ru]
                        mask[rv] |= mask[ru]
            if occupied[origin]:
                new = mask[_find(parent, origin)] & all_bits & ~fired
                if new:
                    for b in range(n_events):
                        if new & (1 << b):
                            row[b] = m + 1
                    fired |= new
                    if fired == all_bits:
                        break
        for b in range(n_events):
            mstar[run, b] = row[b]


def nz_wrap_site(indptr, indices, disp, run_seeds, mstar) -> None:
    """Occupation sweep firing when a cluster first winds around a periodic
    axis (displacement mismatch on an in-cluster bond)."""
    m_sites = len(indptr) - 1
    ndim = disp.shape[1]
    indptr_l = indptr.tolist()
    indices_l = indices.tolist()
    disp_l = disp.reshape(-1).tolist()
    for run in range(len(run_seeds)):
        state = int(run_seeds[run])
        perm = list(range(m_sites))
        parent = [0] * m_sites
        size = [0] * m_sites
        off = [0] * (m_sites * ndim)
        occupied = bytearray(m_sites)
        hit = m_sites + 1
        for m in range(m_sites):
            state, j = _draw(state, m_sites - m)
            j += m
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
            for e in range(indptr_l[v], indptr_l[v + 1]):
                u = indices_l[e]
                if not occupied[u]:
                    continue
                rv = _find_disp(parent, off, ndim, v)
                ru = _find_disp(parent, off, ndim, u)
                ebase = e * ndim
                ub = u * ndim
                if rv == ru:
                    for a in range(ndim):
                        if off[ub + a] - off[base_v + a] != disp_l[ebase + a]:
                            wrapped = True
                            break
                    if wrapped:
                        break
                elif size[rv] < size[ru]:
                    parent[rv] = ru
                    size[ru] += size[rv]
                    for a in range(ndim):
                        off[rv * ndim + a] = off[ub + a] - disp_l[ebase + a] - off[base_v + a]
                else:
                    parent[ru] = rv
                    size[rv] += size[ru]
                    for a in range(ndim):
                        off[ru * ndim + a] = off[base_v + a] + disp_l[ebase + a] - off[ub + a]
            if wrapped:
                hit = m + 1
                break
        mstar[run] = hit


def nz_face_site(indptr, indices, face_mask, run_seeds, mstar) -> None:
    """Occupation sweep firing when one cluster first touches both faces."""
    m_sites = len(indptr) - 1
    indptr = indptr.tolist()
    indices = indices.tolist()
    faces = face_mask.tolist()
    for run in range(len(run_seeds)):
        state = int(run_seeds[run])
        perm = list(range(m_sites))
        parent = [0] * m_sites
        size = [0] * m_sites
        mask = [0] * m_sites
        occupied = bytearray(m_sites)
        hit = m_sites + 1
        for m in range(m_sites):
            state, j = _draw(state, m_sites - m)
            j += m
            v = perm[j]
            perm[j] = perm[m]
            perm[m] = v
            occupied[v] = 1
            parent[v] = v
            size[v] = 1
            mask[v] = faces[v]
            rv = v
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if occupied[u]:
                    rv = _find(parent, rv)
                    ru = _find(parent, u)
                    if rv != ru:
                        if size[rv] < size[ru]:
                            rv, ru = ru, rv
                        parent[ru] = rv
                        size[rv] += size[ru]
                        mask[rv] |= mask[ru]
            if mask[_find(parent, v)] == 3:
                hit = m + 1
                break
        mstar[run] = hit


def nz_reach_bond(edge_u, edge_v, n_vertices, far_mask, origin, n_events, run_seeds, mstar) -> None:
    """Bond-insertion sweep; all sites present, m counts open bonds."""
    n = int(n_vertices)
    m_edges = len(edge_u)
    eu = edge_u.tolist()
    ev = edge_v.tolist()
    far = far_mask.tolist()
    origin = int(origin)
    all_bits = (1 << n_events) - 1
    for run in range(len(run_seeds)):
        state = int(run_seeds[run])
        perm = list(range(m_edges))
        parent = list(range(n))
        size = [1] * n
        mask = far.copy()
        fired = 0
        row = [m_edges + 1] * n_events
        for m in range(m_edges):
            state, j = _draw(state, m_edges - m)
            j += m
            e = perm[j]
            perm[j] = perm[m]
            perm[m] = e
            rv = _find(parent, eu[e])
            ru = _find(parent, ev[e])
            if rv != ru:
                if size[rv] < size[ru]:
                    rv, ru = ru, rv
                parent[ru] = rv
                size[rv] += size[ru]
                mask[rv] |= mask[ru]
            new = mask[_find(parent, origin)] & all_bits & ~fired
            if new:
                for b in range(n_events):
                    if new & (1 << b):
                        row[b] = m + 1
                fired |= new
                if fired == all_bits:
                    break
        for b in range(n_events):
            mstar[run, b] = row[b]


def nz_wrap_bond(edge_u, edge_v, n_vertices, disp, run_seeds, mstar) -> None:
    n = int(n_vertices)
    m_edges = len(edge_u)
    ndim = disp.shape[1]
    eu = edge_u.tolist()
    ev = edge_v.tolist()
    disp_l = disp.reshape(-1).tolist()
    for run in range(len(run_seeds)):
        state = int(run_seeds[run])
        perm = list(range(m_edges))
        parent = list(range(n))
        size = [1] * n
        off = [0] * (n * ndim)
        hit = m_edges + 1
        for m in range(m_edges):
            state, j = _draw(state, m_edges - m)
            j += m
            e = perm[j]
            perm[j] = perm[m]
            perm[m] = e
            v = eu[e]
            u = ev[e]
            rv = _find_disp(parent, off, ndim, v)
            ru = _find_disp(parent, off, ndim, u)
            ebase = e * ndim
            vb = v * ndim
            ub = u * ndim
            if rv == ru:
                wrapped = False
                for a in range(ndim):
                    if off[ub + a] - off[vb + a] != disp_l[ebase + a]:
                        wrapped = True
                        break
                if wrapped:
                    hit = m + 1
                    break
            elif size[rv] < size[ru]:
                parent[rv] = ru
                size[ru] += size[rv]
                for a in range(ndim):
                    off[rv * ndim + a] = off[ub + a] - disp_l[ebase + a] - off[vb + a]
            else:
                parent[ru] = rv
                size[rv] += size[ru]
                for a in range(ndim):
                    off[ru * ndim + a] = off[vb + a] + disp_l[ebase + a] - off[ub + a]
        mstar[run] = hit


def nz_face_bond(edge_u, edge_v, n_vertices, face_mask, run_seeds, mstar) -> None:
    n = int(n_vertices)
    m_edges = len(edge_u)
    eu = edge_u.tolist()
    ev = edge_v.tolist()
    faces = face_mask.tolist()
    for run in range(len(run_seeds)):
        state = int(run_seeds[run])
        perm = list(range(m_edges))
        parent = list(range(n))
        size = [1] * n
        mask = faces.copy()
        hit = m_edges + 1
        for m in range(m_edges):
            state, j = _draw(state, m_edges - m)
            j += m
            e = perm[j]
            perm[j] = perm[m]
            perm[m] = e
            rv = _find(parent, eu[e])
            ru = _find(parent, ev[e])
            if rv != ru:
                if size[rv] < size[ru]:
                    rv, ru = ru, rv
                parent[ru] = rv
                size[rv] += size[ru]
                mask[rv] |= mask[ru]
                if mask[rv] == 3:
                    hit = m + 1
                    break
        mstar[run] = hit
