"""Cayley graphs of projective matrix groups: breadth-first closure from
the identity, colored subgraph extraction, clique-complex cell counting,
and text/binary serialization with round-trip guarantees."""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .ffield import get_field
from .genforge import KIND_OMEGABAR, KIND_OMEGAHAT, GenSet, _prime_power
from .projmat import MatSpace, ProjMat, mat_inv
from .util import atomic_write_bytes, atomic_write_text, ordered_chunked_map

_MAGIC = b"CAYG"
_VERSION = 1
_HEADER = struct.Struct("<4sIQIIIIBB")


class VertexLimitError(RuntimeError):
    """The breadth-first closure exceeded the vertex gate; no partial
    graph is emitted."""


class CliqueBudgetError(RuntimeError):
    """Clique enumeration exceeded its work budget."""


class CayleyGraph:
    """Finite vertex-transitive graph of a matrix group closure.

    Vertices are canonical projective matrices, stored as packed keys;
    vertex 0 is the identity and numbering follows breadth-first
    discovery order (generators applied in serialized order within each
    frontier, which is independent of the worker count).  ``nbr[v, i]``
    is the index of vertex v right-multiplied by generator i, so every
    vertex has exactly r out-edges; ``gen_colors[i]`` labels all edges of
    generator i.  ``symmetric`` records whether the edge relation is an
    undirected one, ``connected`` whether every vertex is reachable from
    the identity along stored edges.
    """

    __slots__ = (
        "F",
        "d",
        "n",
        "r",
        "keys",
        "nbr",
        "gen_colors",
        "symmetric",
        "connected",
        "_space",
        "_sorted",
        "_order",
    )

    def __init__(self, F, d, keys, nbr, gen_colors, symmetric, connected):
        self.F = F
        self.d = int(d)
        self.keys = keys
        self.nbr = nbr
        self.gen_colors = tuple(int(c) for c in gen_colors)
        self.n = int(keys.shape[0])
        self.r = int(nbr.shape[1])
        if nbr.shape != (self.n, self.r):
            raise ValueError("neighbor table shape mismatch")
        if len(self.gen_colors) != self.r:
            raise ValueError("one color per generator is required")
        self.symmetric = bool(symmetric)
        self.connected = bool(connected)
        self._space = None
        self._sorted = None
        self._order = None

    # -- vertex access ------------------------------------------------

    def space(self) -> MatSpace:
        if self._space is None:
            self._space = MatSpace(self.F, self.d)
        return self._space

    def vertex_matrix(self, v: int) -> ProjMat:
        rows = self.space().unpack(self.keys[v : v + 1])[0]
        return ProjMat(self.F, tuple(tuple(int(x) for x in row) for row in rows))

    def vertex_index(self, mat: ProjMat) -> int:
        if self._sorted is None:
            self._order = np.argsort(self.keys, kind="stable")
            self._sorted = self.keys[self._order]
        key = self.space().pack(self.space().asbatch([mat.rows]))
        pos = int(np.searchsorted(self._sorted, key[0]))
        if pos == self.n or self._sorted[pos] != key[0]:
            raise KeyError("matrix is not a vertex of this graph")
        return int(self._order[pos])

    def generator_matrices(self) -> list[ProjMat]:
        """The generator list recovered from the identity vertex's
        out-neighbors (vertex 0 is the identity, so 0 -> g lands on g)."""
        return [self.vertex_matrix(int(v)) for v in self.nbr[0]]

    # -- comparison ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, CayleyGraph):
            return NotImplemented
        return (
            self.F == other.F
            and self.d == other.d
            and self.gen_colors == other.gen_colors
            and self.symmetric == other.symmetric
            and self.connected == other.connected
            and np.array_equal(self.keys, other.keys)
            and np.array_equal(self.nbr, other.nbr)
        )

    def __hash__(self):
        return hash((self.n, self.r, self.d, self.gen_colors))

    def __repr__(self):
        return (
            f"CayleyGraph(n={self.n}, r={self.r}, d={self.d}, "
            f"q={self.F.q}, symmetric={self.symmetric}, "
            f"connected={self.connected})"
        )


# ---------------------------------------------------------------------------
# Breadth-first closure
# ---------------------------------------------------------------------------


def bfs_build(gens: GenSet, max_vertices: int, threads: int = 1) -> CayleyGraph:
    """Breadth-first closure of a symmetric generator system.

    Explores from the identity until no new vertices appear; the vertex
    count is the order of the generated group.  Raises VertexLimitError
    as soon as the discovered vertex count would exceed ``max_vertices``
    (no partial graph is ever returned).
    """
    if gens.kind not in (KIND_OMEGABAR, KIND_OMEGAHAT):
        raise ValueError("breadth-first closure expects a symmetric system")
    params = gens.params
    return closure_from_matrices(
        params.base,
        params.d,
        gens.finite_rows(),
        colors=[g.color for g in gens],
        max_vertices=max_vertices,
        threads=threads,
    )


def closure_from_matrices(
    F,
    d: int,
    mats,
    colors=None,
    max_vertices: int = 1_000_000,
    threads: int = 1,
) -> CayleyGraph:
    """Breadth-first closure of an explicit list of row-tuple matrices.

    The matrices must be nonsingular, canonical-form distinct, and none
    may be the identity (self-loops are not representable).  ``colors``
    defaults to zero labels.  Vertex numbering is by discovery order:
    frontier vertices in index order, generators in list order, which is
    deterministic for every thread count.
    """
    ms = MatSpace(F, d)
    O = ms.asbatch([ProjMat(F, m).rows for m in mats])
    r = O.shape[0]
    if colors is None:
        colors = [0] * r
    colors = [int(c) for c in colors]
    if len(colors) != r:
        raise ValueError("one color per generator is required")
    gen_keys = ms.pack(O)
    if len(np.unique(gen_keys)) != r:
        raise ValueError("generators must be projectively distinct")
    ident = ms.identity_batch(1)
    ident_key = ms.pack(ident)[0]
    if np.any(gen_keys == ident_key):
        raise ValueError("the identity cannot be a generator")

    all_keys = ms.pack(ident)
    sorted_keys = all_keys.copy()
    sorted_ids = np.zeros(1, dtype=np.int64)
    nbr_rows = []
    frontier = ident

    def products(blocks):
        out = []
        for block in blocks:
            A = np.repeat(block, r, axis=0)
            B = np.tile(O, (block.shape[0], 1, 1))
            out.append(ms.pack(ms.canon(ms.mul(A, B))))
        return out

    while frontier.shape[0]:
        m = frontier.shape[0]
        blocks = [frontier[i : i + 4096] for i in range(0, m, 4096)]
        flat = np.concatenate(
            ordered_chunked_map(products, blocks, threads=threads, chunk=1)
        )
        pos = np.searchsorted(sorted_keys, flat)
        pos_c = np.minimum(pos, len(sorted_keys) - 1)
        known = sorted_keys[pos_c] == flat
        fresh = np.nonzero(~known)[0]
        if fresh.size:
            uniq, first = np.unique(flat[fresh], return_index=True)
            # number new vertices by first appearance in the product
            # stream (frontier-major, generator-minor): true BFS
            # discovery order, identical for any chunking
            disc = np.argsort(first, kind="stable")
            new_keys = uniq[disc]
            if len(all_keys) + len(new_keys) > max_vertices:
                raise VertexLimitError(
                    f"closure exceeds max_vertices={max_vertices} "
                    f"(at least {len(all_keys) + len(new_keys)} vertices)"
                )
            all_keys = np.concatenate([all_keys, new_keys])
            order = np.argsort(all_keys, kind="stable")
            sorted_keys = all_keys[order]
            sorted_ids = order.astype(np.int64)
            frontier = ms.unpack(new_keys)
        else:
            frontier = frontier[:0]
        pos = np.searchsorted(sorted_keys, flat)
        ids = sorted_ids[pos]
        nbr_rows.append(ids.reshape(m, r).astype(np.int32))

    keys = all_keys
    nbr = np.vstack(nbr_rows)
    srt = np.sort(nbr, axis=1)
    if np.any(srt[:, 1:] == srt[:, :-1]):
        raise AssertionError("regularity violated: repeated out-neighbor")
    symmetric = _verify_symmetry(ms, nbr, O)
    return CayleyGraph(F, d, keys, nbr, colors, symmetric, True)


def _verify_symmetry(ms, nbr, O) -> bool:
    """True iff the generator set is inverse-closed, in which case the
    pairing nbr[nbr[v, i], inv(i)] == v is checked for every vertex."""
    F = ms.F
    gen_keys = ms.pack(O)
    inv_rows = [
        mat_inv(F, tuple(tuple(int(x) for x in row) for row in m)) for m in O
    ]
    inv_keys = ms.pack(ms.canon(ms.asbatch(inv_rows)))
    order = np.argsort(gen_keys, kind="stable")
    pos = np.searchsorted(gen_keys[order], inv_keys)
    pos_c = np.minimum(pos, len(gen_keys) - 1)
    if not np.all(gen_keys[order][pos_c] == inv_keys):
        return False
    partner = order[pos_c]
    v = np.arange(nbr.shape[0], dtype=np.int64)
    for i in range(nbr.shape[1]):
        if not np.array_equal(nbr[nbr[:, i], partner[i]], v):
            raise AssertionError(f"edge relation not symmetric at generator {i}")
    return True


# ---------------------------------------------------------------------------
# Colored subgraphs
# ---------------------------------------------------------------------------


def colored_subgraph(G: CayleyGraph, colors) -> CayleyGraph:
    """Restriction of the graph to edges whose color lies in ``colors``.

    Vertices are unchanged; generators (hence out-edges) are filtered.
    The symmetric flag is recomputed from the surviving generator set
    and connectivity is re-derived by traversal of the undirected view.
    """
    wanted = {int(c) for c in colors}
    if not wanted:
        raise ValueError("empty color set")
    keep = [i for i, c in enumerate(G.gen_colors) if c in wanted]
    if not keep:
        raise ValueError(f"no generator carries a color in {sorted(wanted)}")
    nbr = np.ascontiguousarray(G.nbr[:, keep])
    colors_kept = [G.gen_colors[i] for i in keep]
    ms = G.space()
    O = ms.asbatch([G.vertex_matrix(int(v)).rows for v in nbr[0]])
    symmetric = _verify_symmetry(ms, nbr, O)
    connected = _is_connected(nbr, symmetric)
    return CayleyGraph(G.F, G.d, G.keys, nbr, colors_kept, symmetric, connected)


def _is_connected(nbr: np.ndarray, symmetric: bool) -> bool:
    """Reachability of every vertex from vertex 0 in the undirected view.

    Right-multiplication by a fixed generator permutes the vertices, so
    each neighbor-table column is a permutation and the reverse edges of
    a directed view are its column-wise inverse permutations.
    """
    n = nbr.shape[0]
    if symmetric:
        rev = None
    else:
        rev = np.full_like(nbr, -1)
        ar = np.arange(n, dtype=nbr.dtype)
        for i in range(nbr.shape[1]):
            rev[nbr[:, i], i] = ar
        if rev.min() < 0:
            raise AssertionError("a generator column is not a permutation")
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    frontier = np.array([0], dtype=np.int64)
    reached = 1
    while frontier.size:
        cand = nbr[frontier].ravel()
        if rev is not None:
            cand = np.concatenate([cand, rev[frontier].ravel()])
        cand = np.unique(cand)
        fresh = cand[~visited[cand]]
        visited[fresh] = True
        reached += fresh.size
        frontier = fresh
    return reached == n


# ---------------------------------------------------------------------------
# Clique cells
# ---------------------------------------------------------------------------


class CellCounts:
    """Exact counts of i-cells (complete (i+1)-vertex subgraphs) of the
    clique complex, for i = 0..max_dim, each subset counted once."""

    __slots__ = ("counts",)

    def __init__(self, counts):
        self.counts = tuple(int(c) for c in counts)

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def __len__(self):
        return len(self.counts)

    def __eq__(self, other):
        if isinstance(other, CellCounts):
            return self.counts == other.counts
        return NotImplemented

    def __repr__(self):
        return f"CellCounts({list(self.counts)})"


def clique_cells(G: CayleyGraph, max_dim: int, budget: int = 50_000_000) -> CellCounts:
    """Cell counts of the clique complex up to dimension ``max_dim``.

    Cliques through one vertex are enumerated on its neighbor-induced
    subgraph; vertex-transitivity (every closure is one, and an edge- or
    color-filtered closure stays one) turns the local count c_k of
    k-cliques through a vertex into the global count n*c_k/k.  The local
    count is recomputed at a second vertex and must agree, and every
    division must be exact, so a non-transitive neighbor table fails
    loudly rather than returning a wrong count.
    """
    if not G.symmetric:
        raise ValueError("the clique complex needs an undirected graph")
    if not 0 <= max_dim <= G.d:
        raise ValueError(f"max_dim must lie in 0..{G.d}")
    counts = [G.n]
    if max_dim == 0:
        return CellCounts(counts)
    local0 = _local_clique_counts(G, 0, max_dim, budget)
    if G.n > 1:
        other = _local_clique_counts(G, G.n // 2, max_dim, budget)
        if other != local0:
            raise AssertionError(
                "local clique counts differ between vertices; the graph "
                "is not vertex-transitive"
            )
    for k in range(2, max_dim + 2):
        c_k = local0[k - 1]
        total = G.n * c_k
        if total % k:
            raise AssertionError(
                f"clique count {total} not divisible by {k}; the graph "
                "is not vertex-transitive"
            )
        counts.append(total // k)
    return CellCounts(counts)


def _local_clique_counts(G: CayleyGraph, v: int, max_dim: int, budget: int):
    """Numbers of k-cliques, k = 1..max_dim, in the subgraph induced on
    the out-neighbors of vertex v (sizes of cliques through v, shifted
    down by one)."""
    nb = G.nbr[v]
    r = nb.shape[0]
    masks = []
    for i in range(r):
        row = G.nbr[nb[i]]
        hit = np.isin(nb, row)
        hit[i] = False
        mask = 0
        for j in np.nonzero(hit)[0]:
            mask |= 1 << int(j)
        masks.append(mask)
    counts = [0] * (max_dim + 1)
    counts[1] = r if max_dim >= 1 else 0
    work = 0

    def grow(cand: int, size: int):
        nonlocal work
        rest = cand
        while rest:
            low = rest & -rest
            j = low.bit_length() - 1
            rest ^= low
            work += 1
            if work > budget:
                raise CliqueBudgetError(
                    f"clique enumeration exceeded budget={budget}"
                )
            counts[size + 1] += 1
            if size + 1 < max_dim:
                nxt = cand & masks[j] & ~((low << 1) - 1)
                if nxt:
                    grow(nxt, size + 1)

    if max_dim >= 2:
        for i in range(r):
            above = ~((1 << (i + 1)) - 1)
            cand = masks[i] & above
            if cand:
                grow(cand, 1)
    return counts


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _key_width(q: int, d: int) -> int:
    return ((q ** (d * d) - 1).bit_length() + 7) // 8


def _keys_to_ints(G: CayleyGraph):
    """Vertex keys as arbitrary-precision packed values (radix q,
    row-major, least-significant first), matching ProjMat.packed()."""
    ms = G.space()
    if ms.packable:
        return [int(k) for k in G.keys]
    mats = ms.unpack(G.keys)
    return [ms.packed_of(tuple(map(tuple, m))) for m in mats]


def _keys_from_ints(F, d: int, values) -> np.ndarray:
    ms = MatSpace(F, d)
    if ms.packable:
        return np.array(values, dtype=np.int64)
    q = F.q
    mats = np.zeros((len(values), d, d), dtype=ms.dtype)
    for i, val in enumerate(values):
        for k in range(d * d):
            mats[i, k // d, k % d] = val % q
            val //= q
    return ms.pack(mats)


def export_graph(G: CayleyGraph, path: str, format: str = "binary") -> None:
    """Write a graph to disk; ``format`` is ``binary`` or ``text``.

    Both encodings are bit-exact round-trips including vertex numbering.
    The binary form is little-endian fixed-width records followed by a
    64-bit checksum of the preceding byte stream.
    """
    if format == "text":
        atomic_write_text(path, graph_to_text(G))
    elif format == "binary":
        atomic_write_bytes(path, graph_to_bytes(G))
    else:
        raise ValueError(f"unknown format {format!r}")


def import_graph(path: str) -> CayleyGraph:
    """Read a graph written by export_graph, auto-detecting the format."""
    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:4] == _MAGIC:
        return graph_from_bytes(blob)
    return graph_from_text(blob.decode("utf-8"))


def graph_to_text(G: CayleyGraph) -> str:
    F = G.F
    head = f"version={_VERSION} n={G.n} r={G.r} q={F.q} d={G.d}"
    head += f" sym={int(G.symmetric)} conn={int(G.connected)}"
    if F.f > 1:
        head += " bmod=" + ",".join(str(c) for c in F.modulus)
    lines = [head]
    for value in _keys_to_ints(G):
        lines.append(f"v {value:x}")
    nbr = G.nbr
    for u in range(G.n):
        row = nbr[u]
        for i in range(G.r):
            lines.append(f"e {u} {row[i]} {i} {G.gen_colors[i]}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> CayleyGraph:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty graph file")
    head = {}
    for tok in lines[0].split():
        k, _, val = tok.partition("=")
        head[k] = val
    if head.get("version") != str(_VERSION):
        raise ValueError(f"unsupported version {head.get('version')!r}")
    try:
        n, r, q, d = (int(head[k]) for k in ("n", "r", "q", "d"))
    except KeyError as missing:
        raise ValueError(f"graph header lacks field {missing}") from None
    p, f = _prime_power(q)
    bmod = None
    if "bmod" in head:
        bmod = tuple(int(c) for c in head["bmod"].split(","))
    F = get_field(p, f, bmod)
    values = []
    edge_at = n + 1
    for ln in lines[1:edge_at]:
        tag, _, hexval = ln.partition(" ")
        if tag != "v":
            raise ValueError("truncated vertex table")
        values.append(int(hexval, 16))
    if len(values) != n:
        raise ValueError("truncated vertex table")
    keys = _keys_from_ints(F, d, values)
    nbr = np.full((n, r), -1, dtype=np.int32)
    gen_colors = [-1] * r
    count = 0
    for ln in lines[edge_at:]:
        if not ln.strip():
            continue
        parts = ln.split()
        if parts[0] != "e" or len(parts) != 5:
            raise ValueError(f"malformed edge line {ln!r}")
        u, v, i, c = (int(x) for x in parts[1:])
        if not (0 <= u < n and 0 <= v < n and 0 <= i < r):
            raise ValueError(f"edge endpoint out of range in {ln!r}")
        if gen_colors[i] == -1:
            gen_colors[i] = c
        elif gen_colors[i] != c:
            raise ValueError(f"generator {i} carries two colors")
        nbr[u, i] = v
        count += 1
    if count != n * r or np.any(nbr < 0):
        raise ValueError("truncated edge table")
    return _validated_graph(
        F, d, keys, nbr, gen_colors, head.get("sym") == "1", head.get("conn") == "1"
    )


def graph_to_bytes(G: CayleyGraph) -> bytes:
    F = G.F
    parts = [
        _HEADER.pack(
            _MAGIC,
            _VERSION,
            G.n,
            G.r,
            F.q,
            G.d,
            F.f,
            int(G.symmetric),
            int(G.connected),
        )
    ]
    if F.f > 1:
        parts.append(struct.pack("<H", len(F.modulus)))
        parts.append(bytes(list(F.modulus)))
    parts.append(bytes(list(G.gen_colors)))
    width = _key_width(F.q, G.d)
    for value in _keys_to_ints(G):
        parts.append(value.to_bytes(width, "little"))
    parts.append(np.ascontiguousarray(G.nbr.astype("<i4")).tobytes())
    body = b"".join(parts)
    digest = hashlib.blake2b(body, digest_size=8).digest()
    return body + digest


def graph_from_bytes(blob: bytes) -> CayleyGraph:
    if len(blob) < _HEADER.size + 8:
        raise ValueError("truncated graph file")
    body, digest = blob[:-8], blob[-8:]
    if hashlib.blake2b(body, digest_size=8).digest() != digest:
        raise ValueError("checksum mismatch: corrupted graph file")
    magic, version, n, r, q, d, f, sym, conn = _HEADER.unpack_from(body, 0)
    if magic != _MAGIC:
        raise ValueError("not a binary graph file")
    if version != _VERSION:
        raise ValueError(f"unsupported version {version}")
    off = _HEADER.size
    bmod = None
    if f > 1:
        (mlen,) = struct.unpack_from("<H", body, off)
        off += 2
        bmod = tuple(body[off : off + mlen])
        off += mlen
    p, _ = _prime_power(q)
    F = get_field(p, f, bmod)
    gen_colors = list(body[off : off + r])
    off += r
    width = _key_width(q, d)
    expected = off + n * width + n * r * 4
    if len(body) != expected:
        raise ValueError("truncated graph file")
    values = [
        int.from_bytes(body[off + i * width : off + (i + 1) * width], "little")
        for i in range(n)
    ]
    off += n * width
    keys = _keys_from_ints(F, d, values)
    nbr = np.frombuffer(body, dtype="<i4", offset=off, count=n * r)
    nbr = nbr.reshape(n, r).astype(np.int32)
    return _validated_graph(F, d, keys, nbr, gen_colors, bool(sym), bool(conn))


def _validated_graph(F, d, keys, nbr, gen_colors, symmetric, connected):
    n = keys.shape[0]
    if n == 0:
        raise ValueError("empty vertex table")
    if np.any(nbr < 0) or np.any(nbr >= n):
        raise ValueError("neighbor index out of range")
    ms = MatSpace(F, d)
    ident_key = ms.pack(ms.identity_batch(1))[0]
    if keys[0] != ident_key:
        raise ValueError("vertex 0 is not the identity")
    if len(np.unique(keys)) != n:
        raise ValueError("duplicate vertex keys")
    return CayleyGraph(F, d, keys, nbr, gen_colors, symmetric, connected)
