"""Constructive maps between the lattice families, and their verifiers.

The pruned lattice is isomorphic to the slab through the mixed-radix
decomposition applied coordinate-wise; the decorated slab is the image of the
full hypercubic lattice under a blockwise carry fold whose fibers are the
orbits of a group of shear automorphisms.  Everything here is exact integer
arithmetic: floored division and Euclidean (nonnegative) remainders
throughout, which is what makes the decomposition bijective on negative
coordinates as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    DECORATED,
    DECORATED_SLAB,
    FAMILIES,
    HYPERCUBIC,
    PRUNED,
    SLAB,
    GraphView,
    LatticeSpec,
    Vertex,
    Window,
    block_digits,
    block_value,
    deleted_edge_scale,
)

DEFAULT_SEED = 12345


# ---------------------------------------------------------------------------
# point maps


def line_to_slab(v: int, spec: LatticeSpec) -> tuple[int, ...]:
    """Mixed-radix decomposition of a line coordinate into slab digits.

    Leading digit is the unbounded quotient by L_n; the following digits have
    radixes k_n, ..., k_1.  Defined for every integer, negatives included.
    """
    return block_digits(v, spec)


def slab_to_line(z: tuple[int, ...], spec: LatticeSpec) -> int:
    """Inverse decomposition; rejects out-of-range bounded digits."""
    _require_block(z, spec)
    return block_value(z, spec)


def _require_block(z: tuple[int, ...], spec: LatticeSpec):
    if len(z) != spec.block_len:
        raise ValueError(f"block must have {spec.block_len} digits, got {len(z)}")
    for m, (digit, radix) in enumerate(zip(z[1:], spec.digit_radix)):
        if not 0 <= digit < radix:
            raise ValueError(f"digit {digit} at position {m + 1} outside [0, {radix})")


def lattice_to_slab(v: Vertex, spec: LatticeSpec) -> Vertex:
    """Coordinate-wise decomposition of a Z^d vertex into slab coordinates."""
    if len(v) != spec.d:
        raise ValueError(f"vertex must have {spec.d} coordinates, got {len(v)}")
    out: list[int] = []
    for c in v:
        out.extend(block_digits(c, spec))
    return tuple(out)


def slab_to_lattice(z: Vertex, spec: LatticeSpec) -> Vertex:
    """Inverse of lattice_to_slab; rejects out-of-range digits."""
    b = spec.block_len
    if len(z) != spec.d * b:
        raise ValueError(f"vertex must have {spec.d * b} coordinates, got {len(z)}")
    return tuple(slab_to_line(z[r * b : (r + 1) * b], spec) for r in range(spec.d))


def carry_fold(y: tuple[int, ...], spec: LatticeSpec) -> tuple[int, ...]:
    """Fold one Z^{n+1} block onto the slab block by carry propagation.

    Working from the finest digit up: reduce modulo the radix, push the
    floored quotient into the next coarser digit, and let the final carry be
    absorbed by the unbounded leading coordinate.  Range-valid blocks are
    fixed points.
    """
    if len(y) != spec.block_len:
        raise ValueError(f"block must have {spec.block_len} digits, got {len(y)}")
    n = spec.n
    if n == 0:
        return (y[0],)
    z = [0] * (n + 1)
    # digit m (0-based) has radix k_{n-m}; iterate m = n down to 1
    carry = 0
    for m in range(n, 0, -1):
        radix = spec.k[n - m]
        total = y[m] + carry
        z[m] = total % radix
        carry = total // radix
    z[0] = y[0] + carry
    return tuple(z)


def fold_to_slab(v: Vertex, spec: LatticeSpec) -> Vertex:
    """Blockwise carry fold of a Z^{d(n+1)} vertex onto the slab."""
    b = spec.block_len
    if len(v) != spec.d * b:
        raise ValueError(f"vertex must have {spec.d * b} coordinates, got {len(v)}")
    out: list[int] = []
    for r in range(spec.d):
        out.extend(carry_fold(v[r * b : (r + 1) * b], spec))
    return tuple(out)


def shear(y: tuple[int, ...], j: int, spec: LatticeSpec, power: int = 1) -> tuple[int, ...]:
    """Shear generator on one block: digit n-j decreases by `power` while
    digit n-j+1 gains power * k_j; its fold image is unchanged.

    j ranges over 1..n; power -1 gives the inverse.
    """
    if not 1 <= j <= spec.n:
        raise ValueError(f"shear index must be in 1..{spec.n}, got {j}")
    if len(y) != spec.block_len:
        raise ValueError(f"block must have {spec.block_len} digits, got {len(y)}")
    out = list(y)
    out[spec.n - j] -= power
    out[spec.n - j + 1] += power * spec.k[j - 1]
    return tuple(out)


def lattice_shear(v: Vertex, i: int, j: int, spec: LatticeSpec, power: int = 1) -> Vertex:
    """Apply the block shear to block i (1-based) of a Z^{d(n+1)} vertex."""
    if not 1 <= i <= spec.d:
        raise ValueError(f"block index must be in 1..{spec.d}, got {i}")
    b = spec.block_len
    if len(v) != spec.d * b:
        raise ValueError(f"vertex must have {spec.d * b} coordinates, got {len(v)}")
    out = list(v)
    out[(i - 1) * b : i * b] = shear(v[(i - 1) * b : i * b], j, spec, power)
    return tuple(out)


# ---------------------------------------------------------------------------
# batch maps (used by the sampled verifiers)


def fold_batch(v: np.ndarray, spec: LatticeSpec) -> np.ndarray:
    """Carry fold applied to every row of an (N, d*(n+1)) integer array."""
    v = np.asarray(v, dtype=np.int64)
    out = v.copy()
    b = spec.block_len
    n = spec.n
    for r in range(spec.d):
        carry = np.zeros(len(v), dtype=np.int64)
        for m in range(n, 0, -1):
            radix = spec.k[n - m]
            total = v[:, r * b + m] + carry
            out[:, r * b + m] = total % radix
            carry = total // radix
        out[:, r * b] = v[:, r * b] + carry
    return out


def shear_batch(v: np.ndarray, i: int, j: int, spec: LatticeSpec, power: int = 1) -> np.ndarray:
    """lattice_shear applied to every row."""
    out = np.asarray(v, dtype=np.int64).copy()
    b = spec.block_len
    out[:, (i - 1) * b + spec.n - j] -= power
    out[:, (i - 1) * b + spec.n - j + 1] += power * spec.k[j - 1]
    return out


def block_values_batch(z: np.ndarray, spec: LatticeSpec) -> np.ndarray:
    """(N, d) line coordinates encoded by the blocks of slab-coordinate rows."""
    z = np.asarray(z, dtype=np.int64)
    b = spec.block_len
    weights = np.array(spec.digit_weights, dtype=np.int64)
    return z.reshape(len(z), spec.d, b) @ weights


# ---------------------------------------------------------------------------
# verification reports


@dataclass
class ClaimResult:
    name: str
    passed: bool
    witness: str = ""

    def line(self) -> str:
        if self.passed:
            return f"PASS {self.name}"
        return f"FAIL {self.name} witness={self.witness}"


@dataclass
class VerificationReport:
    claims: list[ClaimResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def add(self, name: str, passed: bool, witness: str = ""):
        self.claims.append(ClaimResult(name, passed, witness))

    def extend(self, other: "VerificationReport"):
        self.claims.extend(other.claims)

    def lines(self) -> list[str]:
        return [c.line() for c in self.claims]

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


# ---------------------------------------------------------------------------
# lattice structural verifier


def check_lattice(spec: LatticeSpec, extent: int) -> VerificationReport:
    """Structural invariants of the neighbor views on small windows.

    Exhaustive on the window: neighbor symmetry for every family, the pruned
    lattice being a subgraph of the decorated one, the periodic degree
    census, and the count of pruned bonds per scale within one period of each
    axis line.
    """
    tag = f"lattice[d={spec.d},k=({spec.k_label()}),window={extent}]"
    report = VerificationReport()
    views = {}
    for family in FAMILIES:
        base = extent if family in (DECORATED, PRUNED) else max(3, extent // spec.period)
        for periodic in (False, True):
            if family in (DECORATED, PRUNED) and periodic and base % spec.period:
                continue
            views[(family, periodic)] = GraphView.build(family, spec, base, periodic)

    bad = None
    for (family, periodic), view in views.items():
        for i in range(view.volume):
            v = view.index_vertex(i)
            for u in view.neighbors(v):
                if v not in view.neighbors(u):
                    bad = f"{family} periodic={periodic}: {v}->{u} not symmetric"
                    break
            if bad:
                break
        if bad:
            break
    report.add(f"{tag}.neighbor-symmetry", bad is None, bad or "")

    bad = None
    for periodic in (False, True):
        g_view = views[(DECORATED, periodic)]
        f_view = views[(PRUNED, periodic)]
        for i in range(g_view.volume):
            v = g_view.index_vertex(i)
            if not set(f_view.neighbors(v)) <= set(g_view.neighbors(v)):
                bad = f"periodic={periodic}: pruned neighbors of {v} not a subset"
                break
        if bad:
            break
    report.add(f"{tag}.pruned-subgraph", bad is None, bad or "")

    # periodic degree census: decorated = full 2d(n+1) minus wrap collapses,
    # pruned = decorated minus incident pruned bonds, hypercubic exact
    bad = None
    g_view = views[(DECORATED, True)]
    f_view = views[(PRUNED, True)]
    for i in range(g_view.volume):
        v = g_view.index_vertex(i)
        expect_g, expect_f = _brute_degrees(v, spec, g_view.window)
        got_g = len(g_view.neighbors(v))
        got_f = len(f_view.neighbors(v))
        if got_g != expect_g or got_f != expect_f:
            bad = (f"vertex {v}: degrees ({got_g},{got_f}) vs brute "
                   f"({expect_g},{expect_f})")
            break
    h_view = views[(HYPERCUBIC, True)]
    full = 2 * spec.d * spec.block_len
    if bad is None and min(h_view.window.sizes) >= 3:
        degs = h_view.adjacency().degrees()
        if not (degs == full).all():
            bad = f"hypercubic degree {int(degs.min())}..{int(degs.max())} != {full}"
    report.add(f"{tag}.degree-census", bad is None, bad or "")

    bad = None
    for i in range(1, spec.n + 1):
        li, lprev = spec.lengths[i], spec.lengths[i - 1]
        start = 17 * li  # any block start; counts are translation invariant
        pruned = sum(
            1 for a in range(start, start + li)
            if deleted_edge_scale((a,), (a - lprev,), LatticeSpec(1, spec.k)) == i
        )
        if pruned != lprev:
            bad = f"scale {i}: {pruned} pruned bonds per {li}-block, expected {lprev}"
            break
    report.add(f"{tag}.pruned-count-per-period", bad is None, bad or "")
    return report


def _brute_degrees(v: Vertex, spec: LatticeSpec, window: Window) -> tuple[int, int]:
    """Window degrees of a decorated/pruned vertex by direct enumeration of
    the length list and the pruning rule with its existential indices."""
    partners_g: set[Vertex] = set()
    partners_f: set[Vertex] = set()
    for axis in range(spec.d):
        for t, length in enumerate(spec.lengths):
            for step in (length, -length):
                c = v[axis] + step
                size = window.sizes[axis]
                if window.periodic[axis]:
                    c %= size
                elif not 0 <= c < size:
                    continue
                if c == v[axis]:
                    continue
                u = v[:axis] + (c,) + v[axis + 1 :]
                partners_g.add(u)
                if t < spec.n and _pruned_by_quantifiers(
                    v[axis] + max(step, 0), t + 1, spec
                ):
                    continue
                partners_f.add(u)
    return len(partners_g), len(partners_f)


def _pruned_by_quantifiers(upper: int, i: int, spec: LatticeSpec) -> bool:
    """Literal existential form of the pruning rule: some block index l and
    residue j < L_{i-1} with upper = l * L_i + j."""
    li, lprev = spec.lengths[i], spec.lengths[i - 1]
    l = upper // li  # floored, so the same l works for negative coordinates
    for j in range(lprev):
        if upper == l * li + j:
            return True
    return False


# ---------------------------------------------------------------------------
# isomorphism verifier


def _transport_claim(tag: str, f_view: GraphView, s_view: GraphView,
                     spec: LatticeSpec) -> VerificationReport:
    """Exhaustive per-vertex neighbor transport between two views.

    Passes when mapping every pruned-lattice neighbor set through the
    decomposition reproduces exactly the slab neighbor set of the image
    vertex (both truncations are consistent, so no boundary slack is
    needed).
    """
    report = VerificationReport()
    mapped_edges = 0
    for i in range(f_view.volume):
        v = f_view.index_vertex(i)
        image = lattice_to_slab(v, spec)
        lhs = sorted(lattice_to_slab(u, spec) for u in f_view.neighbors(v))
        rhs = s_view.neighbors(image)
        if lhs != rhs:
            only_l = [z for z in lhs if z not in rhs]
            only_r = [z for z in rhs if z not in lhs]
            report.add(
                f"{tag}.edge-transport", False,
                f"vertex={v} image={image} extra-image-edges={only_l[:2]} "
                f"missing-image-edges={only_r[:2]}",
            )
            return report
        mapped_edges += len(lhs)
    report.add(f"{tag}.edge-transport", True)
    report.add(f"{tag}.edge-count", mapped_edges == int(s_view.adjacency().n_directed),
               f"directed edges {mapped_edges} vs {int(s_view.adjacency().n_directed)}")
    return report


def check_isomorphism(spec: LatticeSpec, extent: int) -> VerificationReport:
    """Exhaustively verify the pruned-lattice/slab isomorphism on a window.

    Builds the free box [0, extent)^d and the matching slab window with
    extent / L_n sites along each unbounded axis, then checks that the
    coordinate-wise decomposition is a bijection between them and transports
    every neighbor set exactly, in both directions.
    """
    if extent % spec.period != 0:
        raise ValueError(f"extent {extent} must be a multiple of {spec.period}")
    if extent < 2 * spec.period:
        raise ValueError(f"extent {extent} spans fewer than 2 periods of {spec.period}")
    tag = f"isomorphism[d={spec.d},k=({spec.k_label()}),window={extent}]"
    f_view = GraphView.build(PRUNED, spec, extent, periodic=False)
    s_view = GraphView.build(SLAB, spec, extent // spec.period, periodic=False)
    report = VerificationReport()

    seen = np.zeros(s_view.volume, dtype=bool)
    bad = None
    for i in range(f_view.volume):
        image = lattice_to_slab(f_view.index_vertex(i), spec)
        if not s_view.window.contains(image):
            bad = f"image {image} outside slab window"
            break
        si = s_view.vertex_index(image)
        if seen[si]:
            bad = f"image {image} hit twice"
            break
        seen[si] = True
    ok = bad is None and f_view.volume == s_view.volume and bool(seen.all())
    report.add(f"{tag}.bijection", ok, bad or f"covered {int(seen.sum())}/{s_view.volume}")
    if not ok:
        return report
    report.extend(_transport_claim(tag, f_view, s_view, spec))
    return report


# ---------------------------------------------------------------------------
# quotient verifier


def _decorated_adjacent_values(a: np.ndarray, b: np.ndarray, spec: LatticeSpec) -> np.ndarray:
    """Rows where Z^d points a, b are decorated-lattice neighbors."""
    diff = b - a
    nz = diff != 0
    one_axis = nz.sum(axis=1) == 1
    step = np.abs(diff).max(axis=1)
    return one_axis & np.isin(step, spec.lengths)


def check_quotient(spec: LatticeSpec, extent: int = 3, samples: int = 100_000,
                   seed: int = DEFAULT_SEED) -> VerificationReport:
    """Verify that the carry fold behaves as the quotient map onto the
    decorated slab.

    Three sampled/exhaustive claims: (a) the fold is invariant under every
    shear generator and its inverse; (b) the fold image of a hypercubic edge
    is always a pair of distinct adjacent decorated-slab vertices; (c) every
    decorated-slab edge in a window is the image of an explicitly constructed
    hypercubic edge.  `extent` counts coarse periods along each unbounded
    slab axis; claims (a)/(b) sample `samples` vertices.
    """
    tag = f"quotient[d={spec.d},k=({spec.k_label()}),window={extent}]"
    report = VerificationReport()
    if spec.n == 0:
        # degenerate: the fold is the identity and there are no shears
        report.add(f"{tag}.orbit-invariance", True, "no shear generators for n=0")
        report.add(f"{tag}.edge-image", True, "fold is the identity for n=0")
        report.add(f"{tag}.edge-preimage", True, "fold is the identity for n=0")
        return report
    rng = np.random.default_rng(seed)
    dd = spec.d * spec.block_len
    span = 4 * spec.period * max(extent, 3)

    v = rng.integers(-span, span + 1, size=(samples, dd), dtype=np.int64)
    base = fold_batch(v, spec)
    ok = True
    witness = ""
    for i in range(1, spec.d + 1):
        for j in range(1, spec.n + 1):
            for power in (1, -1):
                image = fold_batch(shear_batch(v, i, j, spec, power), spec)
                neq = np.nonzero((image != base).any(axis=1))[0]
                if len(neq):
                    r = int(neq[0])
                    ok = False
                    witness = (f"shear(i={i},j={j},power={power}) moved fold of "
                               f"{tuple(v[r])}: {tuple(base[r])} -> {tuple(image[r])}")
                    break
            if not ok:
                break
        if not ok:
            break
    report.add(f"{tag}.orbit-invariance", ok, witness)

    axes = rng.integers(0, dd, size=samples)
    sign = rng.integers(0, 2, size=samples) * 2 - 1
    u = v.copy()
    u[np.arange(samples), axes] += sign
    zv = fold_batch(v, spec)
    zu = fold_batch(u, spec)
    distinct = (zv != zu).any(axis=1)
    adjacent = _decorated_adjacent_values(
        block_values_batch(zv, spec), block_values_batch(zu, spec), spec
    )
    good = distinct & adjacent
    if good.all():
        report.add(f"{tag}.edge-image", True)
    else:
        r = int(np.nonzero(~good)[0][0])
        report.add(
            f"{tag}.edge-image", False,
            f"edge {tuple(v[r])}->{tuple(u[r])} folds to {tuple(zv[r])}->{tuple(zu[r])} "
            f"(distinct={bool(distinct[r])}, adjacent={bool(adjacent[r])})",
        )

    report.add(*_preimage_claim(tag, spec, extent))
    return report


def _preimage_claim(tag: str, spec: LatticeSpec, extent: int) -> tuple[str, bool, str]:
    """Claim (c): construct a hypercubic preimage of every window edge.

    Plain slab steps are their own preimage; a carry edge of scale i is the
    image of the unit step that drives the digit of weight L_{i-1} from 0 to
    -1 on the larger-value endpoint.
    """
    name = f"{tag}.edge-preimage"
    view = GraphView.build(DECORATED_SLAB, spec, extent, periodic=False)
    b = spec.block_len
    src, dst, _ = view.adjacency().undirected
    for s, t in zip(src.tolist(), dst.tolist()):
        zs = view.index_vertex(s)
        zt = view.index_vertex(t)
        diff_axes = [a for a in range(len(zs)) if zs[a] != zt[a]]
        blocks = {a // b for a in diff_axes}
        if len(blocks) != 1:
            return name, False, f"edge {zs}->{zt} touches several blocks"
        r = blocks.pop()
        if len(diff_axes) == 1 and abs(zs[diff_axes[0]] - zt[diff_axes[0]]) == 1:
            # plain step: the edge is its own preimage; both endpoints fixed
            if fold_to_slab(zs, spec) != zs or fold_to_slab(zt, spec) != zt:
                return name, False, f"window endpoint of {zs}->{zt} not fold-fixed"
            continue
        val_s = block_value(zs[r * b : (r + 1) * b], spec)
        val_t = block_value(zt[r * b : (r + 1) * b], spec)
        length = abs(val_s - val_t)
        if length not in spec.lengths[: spec.n]:
            return name, False, f"edge {zs}->{zt} has non-carry value gap {length}"
        i = spec.lengths.index(length) + 1
        hi = zs if val_s > val_t else zt  # larger endpoint carries digit 0
        lo_list = list(hi)
        lo_list[r * b + (spec.n + 1 - i)] -= 1
        lo = tuple(lo_list)
        want = zt if hi is zs else zs
        if fold_to_slab(lo, spec) != want:
            return name, False, (
                f"constructed preimage {hi}->{lo} folds to "
                f"{fold_to_slab(lo, spec)} instead of {want}"
            )
        if fold_to_slab(hi, spec) != hi:
            return name, False, f"endpoint {hi} not a fixed point of the fold"
    return name, True, f"{len(src)} window edges"
