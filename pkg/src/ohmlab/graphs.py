"""Weighted undirected multigraphs and their cut structure.

Edges are stored as parallel (tail, head, weight) arrays. The (tail, head)
order fixes an arbitrary orientation that the incidence matrix and flow
vectors refer to; the graph itself is undirected. Weights are real and >= 1,
self-loops are rejected, parallel edges are allowed.

Vertex sets are numpy boolean masks of length n (bitset semantics). Helpers
accept index iterables as well and normalize them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from .errors import ConvergenceError, DisconnectedError, SizeLimitError

__all__ = [
    "Multigraph",
    "ConductanceCertificate",
    "as_vertex_mask",
    "volume",
    "cut_weight",
    "conductance_exact",
    "conductance_bounds",
    "girth",
    "random_regular",
    "gadget_subdivide",
    "graph_union",
    "weighted_to_multigraph",
    "read_graph",
    "write_graph",
    "graph_text",
    "cycle_graph",
    "complete_graph",
    "path_graph",
    "petersen_graph",
]

DEFAULT_EDGE_CAP = 2_000_000


@dataclass(frozen=True)
class Multigraph:
    """Immutable weighted multigraph on vertices 0..n-1."""

    n: int
    tails: np.ndarray
    heads: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        tails = np.asarray(self.tails, dtype=np.int64)
        heads = np.asarray(self.heads, dtype=np.int64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if not (tails.shape == heads.shape == weights.shape) or tails.ndim != 1:
            raise ValueError("tails, heads, weights must be 1-d arrays of equal length")
        if self.n < 1:
            raise ValueError("need at least one vertex")
        if tails.size:
            if tails.min() < 0 or heads.min() < 0 or max(tails.max(), heads.max()) >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(tails == heads):
                raise ValueError("self-loops are not allowed")
            if np.any(weights < 1.0):
                raise ValueError("edge weights must be >= 1")
        for arr in (tails, heads, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "tails", tails)
        object.__setattr__(self, "heads", heads)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple]) -> "Multigraph":
        edges = list(edges)
        tails = np.array([e[0] for e in edges], dtype=np.int64)
        heads = np.array([e[1] for e in edges], dtype=np.int64)
        weights = np.array([e[2] if len(e) > 2 else 1.0 for e in edges], dtype=np.float64)
        return cls(n, tails, heads, weights)

    @property
    def m(self) -> int:
        return int(self.tails.size)

    @cached_property
    def weighted_degrees(self) -> np.ndarray:
        deg = np.bincount(self.tails, weights=self.weights, minlength=self.n)
        deg += np.bincount(self.heads, weights=self.weights, minlength=self.n)
        deg.setflags(write=False)
        return deg

    @cached_property
    def is_unit_weight(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    @cached_property
    def component_labels(self) -> np.ndarray:
        """Connected component id per vertex, labels in discovery order."""
        labels = np.full(self.n, -1, dtype=np.int64)
        adj = self.adjacency_lists()
        nxt = 0
        for start in range(self.n):
            if labels[start] >= 0:
                continue
            labels[start] = nxt
            stack = [start]
            while stack:
                u = stack.pop()
                for v, _ in adj[u]:
                    if labels[v] < 0:
                        labels[v] = nxt
                        stack.append(v)
            nxt += 1
        labels.setflags(write=False)
        return labels

    @property
    def is_connected(self) -> bool:
        return self.n == 1 or int(self.component_labels.max()) == 0

    def adjacency_lists(self) -> list:
        """Per-vertex list of (neighbor, edge_id), both edge directions."""
        adj = [[] for _ in range(self.n)]
        for eid in range(self.m):
            t, h = int(self.tails[eid]), int(self.heads[eid])
            adj[t].append((h, eid))
            adj[h].append((t, eid))
        return adj

    def edge_list(self) -> list:
        return [
            (int(t), int(h), float(w))
            for t, h, w in zip(self.tails, self.heads, self.weights)
        ]


@dataclass(frozen=True)
class ConductanceCertificate:
    """A conductance value plus how it was obtained.

    kind is one of "exact", "cheeger-lower-bound", "sweep-upper-bound".
    witness is a vertex mask for the certifying cut side (empty for the
    eigenvalue lower bound, which certifies no particular cut).
    """

    phi: float
    kind: str
    witness: Optional[np.ndarray] = field(default=None, repr=False)


def as_vertex_mask(n: int, s) -> np.ndarray:
    """Normalize a vertex-set argument to a boolean mask of length n."""
    arr = np.asarray(s)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise ValueError(f"mask length {arr.shape} does not match n={n}")
        return arr
    ids = arr.astype(np.int64).ravel()
    if ids.size and (ids.min() < 0 or ids.max() >= n):
        raise ValueError("vertex id out of range")
    mask = np.zeros(n, dtype=bool)
    mask[ids] = True
    return mask


def volume(g: Multigraph, s) -> float:
    """Sum of weighted degrees over the vertex set."""
    mask = as_vertex_mask(g.n, s)
    return float(g.weighted_degrees[mask].sum())


def cut_weight(g: Multigraph, s) -> float:
    """Total weight of edges with exactly one endpoint in the set."""
    mask = as_vertex_mask(g.n, s)
    crossing = mask[g.tails] != mask[g.heads]
    return float(g.weights[crossing].sum())


def conductance_exact(g: Multigraph, max_n: int = 24) -> ConductanceCertificate:
    """Exact conductance by enumerating every cut with vertex 0 fixed on one side.

    Conductance is min over nonempty proper S of cut(S) / min(vol(S), vol(V-S)).
    Enumeration is 2^(n-1) cuts, done in vectorized blocks; n above max_n is
    refused (use conductance_bounds instead). Disconnected graphs have
    conductance 0, certified by one component.

    The witness is the smaller-volume side of the minimizing cut; on a volume
    tie, the side containing vertex 0.
    """
    if g.n > max_n:
        raise SizeLimitError(
            f"exact conductance enumerates 2^(n-1) cuts; n={g.n} exceeds the "
            f"limit {max_n}, use conductance_bounds"
        )
    if g.n < 2:
        raise ValueError("conductance needs at least two vertices")
    if not g.is_connected:
        witness = g.component_labels == 0
        return ConductanceCertificate(phi=0.0, kind="exact", witness=witness)

    wdeg = g.weighted_degrees
    total = float(wdeg.sum())
    nbits = g.n - 1
    count = 1 << nbits

    best_phi = np.inf
    best_mask_id = -1
    block = 1 << 18
    for start in range(0, count, block):
        stop = min(start + block, count)
        masks = np.arange(start, stop, dtype=np.int64)
        vol_s = np.full(masks.size, wdeg[0], dtype=np.float64)
        for v in range(1, g.n):
            vol_s += wdeg[v] * ((masks >> (v - 1)) & 1)
        cut = np.zeros(masks.size, dtype=np.float64)
        for t, h, w in zip(g.tails, g.heads, g.weights):
            bt = 1 if t == 0 else (masks >> (t - 1)) & 1
            bh = 1 if h == 0 else (masks >> (h - 1)) & 1
            cut += w * (bt != bh)
        side = np.minimum(vol_s, total - vol_s)
        with np.errstate(divide="ignore", invalid="ignore"):
            phi_cand = cut / side
        # S = V (the all-ones mask) is not a proper cut
        if stop == count:
            phi_cand[-1] = np.inf
        idx = int(np.argmin(phi_cand))
        if phi_cand[idx] < best_phi:
            best_phi = float(phi_cand[idx])
            best_mask_id = start + idx

    bits = (best_mask_id >> np.arange(nbits)) & 1
    s_mask = np.concatenate(([True], bits.astype(bool)))
    vol_s = float(wdeg[s_mask].sum())
    if vol_s <= total - vol_s:
        witness = s_mask
    else:
        witness = ~s_mask
    return ConductanceCertificate(phi=best_phi, kind="exact", witness=witness)


def _normalized_laplacian(g: Multigraph) -> sp.csr_array:
    d = g.weighted_degrees
    if np.any(d == 0):
        raise DisconnectedError("isolated vertex has no conductance certificate")
    dinv_sqrt = 1.0 / np.sqrt(d)
    rows = np.concatenate([g.tails, g.heads])
    cols = np.concatenate([g.heads, g.tails])
    vals = np.concatenate([g.weights, g.weights])
    adj = sp.coo_array((vals, (rows, cols)), shape=(g.n, g.n)).tocsr()
    norm_adj = sp.csr_array(adj.multiply(dinv_sqrt[:, None]).multiply(dinv_sqrt[None, :]))
    return sp.csr_array(sp.eye_array(g.n, format="csr") - norm_adj)


def _lambda2(g: Multigraph, dense_cutoff: int, maxiter: Optional[int]):
    """Second-smallest normalized-Laplacian eigenvalue and its eigenvector."""
    nl = _normalized_laplacian(g)
    if g.n <= dense_cutoff:
        vals, vecs = scipy.linalg.eigh(nl.toarray(), subset_by_index=[0, 1])
        return max(float(vals[1]), 0.0), vecs[:, 1]
    # deflate the known kernel direction sqrt(d) and take the smallest
    # eigenvalue of the shifted operator
    d = np.sqrt(g.weighted_degrees)
    d = d / np.linalg.norm(d)
    shift = 2.0

    def matvec(x):
        return nl @ x + shift * d * (d @ x)

    op = sp.linalg.LinearOperator((g.n, g.n), matvec=matvec, dtype=np.float64)
    cap = maxiter if maxiter is not None else max(10 * g.n, 10_000)
    try:
        vals, vecs = sp.linalg.eigsh(op, k=1, which="SA", maxiter=cap, tol=1e-10)
    except sp.linalg.ArpackNoConvergence as exc:
        best = exc.eigenvectors[:, 0] if exc.eigenvectors is not None and exc.eigenvectors.size else None
        raise ConvergenceError(
            f"eigenvalue iteration did not converge within {cap} iterations",
            best=best,
            iterations=cap,
        ) from exc
    return max(float(vals[0]), 0.0), vecs[:, 0]


def conductance_bounds(
    g: Multigraph, dense_cutoff: int = 2000, maxiter: Optional[int] = None
) -> tuple:
    """Certified conductance bracket from the normalized Laplacian.

    Returns (lower, upper) certificates: lower is lambda_2 / 2 with no cut
    witness, upper is the best sweep cut over the second eigenvector ordering.
    The bracket lambda_2/2 <= phi <= sweep value holds with the sweep value
    itself at most sqrt(2 lambda_2).
    """
    if not g.is_connected:
        raise DisconnectedError("conductance bounds need a connected graph")
    if g.n < 2:
        raise ValueError("conductance needs at least two vertices")
    lam2, vec = _lambda2(g, dense_cutoff, maxiter)

    wdeg = g.weighted_degrees
    total = float(wdeg.sum())
    score = vec / np.sqrt(wdeg)
    order = np.argsort(score, kind="stable")
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)

    adj = g.adjacency_lists()
    in_s = np.zeros(g.n, dtype=bool)
    cut = 0.0
    vol_s = 0.0
    best_ratio = np.inf
    best_k = 0
    for k in range(g.n - 1):
        v = int(order[k])
        delta = float(wdeg[v])
        for u, eid in adj[v]:
            if in_s[u]:
                delta -= 2.0 * float(g.weights[eid])
        cut += delta
        vol_s += float(wdeg[v])
        in_s[v] = True
        ratio = cut / min(vol_s, total - vol_s)
        if ratio < best_ratio:
            best_ratio = ratio
            best_k = k
    prefix = np.zeros(g.n, dtype=bool)
    prefix[order[: best_k + 1]] = True
    if float(wdeg[prefix].sum()) <= total / 2.0:
        witness = prefix
    else:
        witness = ~prefix
    lower = ConductanceCertificate(phi=lam2 / 2.0, kind="cheeger-lower-bound", witness=None)
    upper = ConductanceCertificate(phi=float(best_ratio), kind="sweep-upper-bound", witness=witness)
    return lower, upper


def girth(g: Multigraph) -> float:
    """Length of the shortest cycle, counting edges and ignoring weights.

    Parallel edges give girth 2; forests have girth inf. One BFS per source;
    for every non-tree edge seen, dist(u) + dist(v) + 1 bounds a cycle length
    and the minimum over sources attains the girth.
    """
    if g.m == 0:
        return np.inf
    pairs = set()
    for t, h in zip(g.tails, g.heads):
        key = (int(min(t, h)), int(max(t, h)))
        if key in pairs:
            return 2.0
        pairs.add(key)

    adj = g.adjacency_lists()
    best = np.inf
    for s in range(g.n):
        dist = np.full(g.n, -1, dtype=np.int64)
        via = np.full(g.n, -1, dtype=np.int64)
        dist[s] = 0
        queue = [s]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for v, eid in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    via[v] = eid
                    queue.append(v)
                elif eid != via[u] and eid != via[v]:
                    cand = dist[u] + dist[v] + 1
                    if cand < best:
                        best = cand
    return float(best)


def random_regular(n: int, d: int, seed: int, max_tries: int = 10_000) -> Multigraph:
    """Random d-regular simple connected graph by the pairing model.

    Stubs are paired uniformly; any self-loop or parallel edge rejects the
    whole pairing, as does a disconnected result. Deterministic per seed.
    """
    if d < 3:
        raise ValueError("degree must be at least 3")
    if n <= d:
        raise ValueError("need more vertices than the degree")
    if (n * d) % 2 != 0:
        raise ValueError("n * d must be even")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(max_tries):
        perm = rng.permutation(stubs)
        a = perm[0::2]
        b = perm[1::2]
        if np.any(a == b):
            continue
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            continue
        order = np.argsort(keys, kind="stable")
        g = Multigraph(n, lo[order], hi[order], np.ones(keys.size))
        if g.is_connected:
            return g
    raise ConvergenceError(
        f"no simple connected {d}-regular pairing found in {max_tries} tries",
        iterations=max_tries,
    )


def gadget_subdivide(g: Multigraph, k: int, cap_edges: int = DEFAULT_EDGE_CAP) -> Multigraph:
    """Replace each unit edge by k vertex-disjoint paths of k unit edges.

    Original vertex ids are preserved; each original edge adds k*(k-1) fresh
    internal vertices and k^2 unit edges. k = 1 returns a copy of the input.
    Effective resistance across a replaced edge's endpoints is preserved
    (k parallel paths of k unit resistors each).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not g.is_unit_weight:
        raise ValueError("gadget subdivision is defined for unit-weight graphs")
    new_m = g.m * k * k
    if new_m > cap_edges:
        raise SizeLimitError(
            f"subdivision would create {new_m} edges, over the cap {cap_edges}"
        )
    if k == 1:
        return Multigraph(g.n, g.tails.copy(), g.heads.copy(), g.weights.copy())
    tails = np.empty(new_m, dtype=np.int64)
    heads = np.empty(new_m, dtype=np.int64)
    nxt = g.n
    pos = 0
    for t, h in zip(g.tails, g.heads):
        for _path in range(k):
            prev = int(t)
            for step in range(1, k + 1):
                if step == k:
                    node = int(h)
                else:
                    node = nxt
                    nxt += 1
                tails[pos] = prev
                heads[pos] = node
                prev = node
                pos += 1
    return Multigraph(nxt, tails, heads, np.ones(new_m))


def graph_union(g: Multigraph, h: Multigraph) -> Multigraph:
    """Edge-disjoint union on the shared id space; n is the larger of the two."""
    n = max(g.n, h.n)
    return Multigraph(
        n,
        np.concatenate([g.tails, h.tails]),
        np.concatenate([g.heads, h.heads]),
        np.concatenate([g.weights, h.weights]),
    )


def weighted_to_multigraph(
    g: Multigraph,
    capacities: Sequence[int],
    lengths: Sequence[int],
    cap_edges: int = DEFAULT_EDGE_CAP,
) -> Multigraph:
    """Expand integer capacities and lengths into a unit multigraph.

    Edge e becomes a path of lengths[e] hops through fresh internal vertices,
    each hop carrying capacities[e] parallel unit edges. With unit lengths the
    vertex set is unchanged and cuts/degrees match the capacity-weighted
    graph exactly.
    """
    cap = np.asarray(capacities)
    ln = np.asarray(lengths)
    if cap.shape != (g.m,) or ln.shape != (g.m,):
        raise ValueError("need one capacity and one length per edge")
    if not (np.issubdtype(cap.dtype, np.integer) or np.all(cap == np.floor(cap))):
        raise ValueError("capacities must be integers")
    if not (np.issubdtype(ln.dtype, np.integer) or np.all(ln == np.floor(ln))):
        raise ValueError("lengths must be integers")
    cap = cap.astype(np.int64)
    ln = ln.astype(np.int64)
    if cap.size and (cap.min() < 1 or ln.min() < 1):
        raise ValueError("capacities and lengths must be >= 1")
    new_m = int((cap * ln).sum())
    if new_m > cap_edges:
        raise SizeLimitError(
            f"expansion would create {new_m} edges, over the cap {cap_edges}"
        )
    tails = np.empty(new_m, dtype=np.int64)
    heads = np.empty(new_m, dtype=np.int64)
    nxt = g.n
    pos = 0
    for e in range(g.m):
        t, h = int(g.tails[e]), int(g.heads[e])
        c, s = int(cap[e]), int(ln[e])
        prev = t
        for step in range(1, s + 1):
            if step == s:
                node = h
            else:
                node = nxt
                nxt += 1
            for _ in range(c):
                tails[pos] = prev
                heads[pos] = node
                pos += 1
            prev = node
    return Multigraph(nxt, tails, heads, np.ones(new_m))


def graph_text(g: Multigraph) -> str:
    """The text format: a header line "n m", then one "tail head weight" line
    per edge."""
    lines = [f"{g.n} {g.m}"]
    for t, h, w in zip(g.tails, g.heads, g.weights):
        lines.append(f"{int(t)} {int(h)} {repr(float(w))}")
    return "\n".join(lines) + "\n"


def write_graph(g: Multigraph, path) -> None:
    """Write the text format to a file; read_graph round-trips it."""
    with open(path, "w") as fh:
        fh.write(graph_text(g))


def read_graph(path) -> Multigraph:
    """Read the text format written by write_graph; '#' lines are comments."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(line.split())
    if not rows:
        raise ValueError(f"{path}: empty graph file")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path}: bad header line, expected 'n m'") from exc
    if len(rows) - 1 != m:
        raise ValueError(f"{path}: header says {m} edges, found {len(rows) - 1}")
    tails = np.empty(m, dtype=np.int64)
    heads = np.empty(m, dtype=np.int64)
    weights = np.empty(m, dtype=np.float64)
    for i, row in enumerate(rows[1:]):
        if len(row) != 3:
            raise ValueError(f"{path}: edge line {i} needs 'tail head weight'")
        tails[i] = int(row[0])
        heads[i] = int(row[1])
        weights[i] = float(row[2])
    return Multigraph(n, tails, heads, weights)


def cycle_graph(k: int) -> Multigraph:
    if k < 3:
        raise ValueError("cycle needs at least 3 vertices")
    tails = np.arange(k, dtype=np.int64)
    heads = (tails + 1) % k
    return Multigraph(k, tails, heads, np.ones(k))


def complete_graph(k: int) -> Multigraph:
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    return Multigraph.from_edges(k, [(i, j, 1.0) for i, j in edges])


def path_graph(k: int) -> Multigraph:
    if k < 2:
        raise ValueError("path needs at least 2 vertices")
    tails = np.arange(k - 1, dtype=np.int64)
    return Multigraph(k, tails, tails + 1, np.ones(k - 1))


def petersen_graph() -> Multigraph:
    edges = []
    for i in range(5):
        edges.append((i, (i + 1) % 5))
        edges.append((i, i + 5))
        edges.append((5 + i, 5 + (i + 2) % 5))
    return Multigraph.from_edges(10, [(a, b, 1.0) for a, b in edges])
