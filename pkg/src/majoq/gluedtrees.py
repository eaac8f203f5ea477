"""Glued binary trees: graph, black-box oracle, and the continuous-time walk.

Columns are numbered 0..2n+1 from the IN root to the OUT root. The walk
Hamiltonian on the full graph is adjacency / sqrt(2), which restricts on the
column subspace to the tridiagonal matrix with unit hops and a sqrt(2) hop
across the glued middle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize_scalar

from .majorization import ProbDist

PALETTE = (0, 1, 2, 3)


def column_sizes(n: int) -> np.ndarray:
    j = np.arange(2 * n + 2)
    return np.where(j <= n, 2.0 ** j, 2.0 ** (2 * n + 1 - j)).astype(np.int64)


def name_width(n: int) -> int:
    """Bits per vertex name: 2n, widened when 2n bits cannot name every vertex."""
    vertices = 2 * (2 ** (n + 1) - 1)
    width = 2 * n
    while 2 ** width - 1 < vertices:
        width += 1
    return width


@dataclass(eq=False)
class GluedTreeGraph:
    n: int
    seed: Optional[int]
    names: List[str]
    columns: np.ndarray
    # (u, v, color) with u < v as vertex ids
    edges: List[Tuple[int, int, int]]
    in_id: int
    out_id: int
    # ids of the gluing cycle in traversal order
    cycle: List[int] = field(default_factory=list)
    _by_name: Dict[str, int] = field(default_factory=dict, repr=False)
    _neighbor: Dict[Tuple[int, int], int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_name = {name: i for i, name in enumerate(self.names)}
        for u, v, c in self.edges:
            self._neighbor[(u, c)] = v
            self._neighbor[(v, c)] = u

    @property
    def width(self) -> int:
        return len(self.names[0])

    @property
    def sentinel(self) -> str:
        return "1" * self.width

    @property
    def num_vertices(self) -> int:
        return len(self.names)

    @property
    def in_vertex(self) -> str:
        return self.names[self.in_id]

    @property
    def out_vertex(self) -> str:
        return self.names[self.out_id]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_vertices, dtype=int)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.num_vertices, self.num_vertices))
        for u, v, _ in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def column_basis(self) -> np.ndarray:
        """Matrix whose column j is |col j> in the vertex basis."""
        sizes = column_sizes(self.n)
        basis = np.zeros((self.num_vertices, 2 * self.n + 2))
        basis[np.arange(self.num_vertices), self.columns] = 1.0
        return basis / np.sqrt(sizes)[None, :]


def build_graph(n: int, seed: Optional[int] = None) -> GluedTreeGraph:
    """Two height-n binary trees whose leaves are joined by a random alternating cycle.

    Tree edges use colors 0-2 (each node passes its children the two colors
    its parent edge does not use); cycle edges alternate between color 3 and
    a free color from 0-2, which keeps the 4-color edge coloring proper.
    """
    if n < 1:
        raise ValueError("tree height must be >= 1")
    rng = np.random.default_rng(seed)
    per_tree = 2 ** (n + 1) - 1
    total = 2 * per_tree
    depth = np.floor(np.log2(np.arange(per_tree) + 1)).astype(int)
    columns = np.concatenate([depth, 2 * n + 1 - depth])

    edges: List[Tuple[int, int, int]] = []
    tree_color = np.full(total, -1)
    for offset in (0, per_tree):
        for parent in range(per_tree // 2):
            used = tree_color[offset + parent]
            free = [c for c in (0, 1, 2) if c != used][:2]
            for child, color in zip((2 * parent + 1, 2 * parent + 2), free):
                edges.append((offset + parent, offset + child, color))
                tree_color[offset + child] = color

    leaves = np.arange(2 ** n - 1, per_tree)
    left = rng.permutation(leaves)
    right = rng.permutation(leaves) + per_tree
    cycle = [int(v) for pair in zip(left, right) for v in pair]
    for i, u in enumerate(cycle):
        v = cycle[(i + 1) % len(cycle)]
        if i % 2 == 0:
            color = 3
        else:
            color = min(c for c in (0, 1, 2) if c not in (tree_color[u], tree_color[v]))
        edges.append((min(u, v), max(u, v), color))

    width = name_width(n)
    # labels 0 .. 2**width - 2: the all-ones string is never drawn
    labels = rng.choice(2 ** width - 1, size=total, replace=False)
    names = [format(int(x), f"0{width}b") for x in labels]
    return GluedTreeGraph(n, seed, names, columns, edges, 0, per_tree, cycle)


def oracle_query(graph: GluedTreeGraph, name: str, color: int) -> str:
    """Name of the vertex across the ``color`` edge of ``name``, else 11...1."""
    vid = graph._by_name.get(name) if isinstance(name, str) else None
    if vid is None:
        return graph.sentinel
    other = graph._neighbor.get((vid, color))
    return graph.sentinel if other is None else graph.names[other]


# ---------------------------------------------------------------- walk


def column_hamiltonian_bands(n: int) -> Tuple[np.ndarray, np.ndarray]:
    off = np.ones(2 * n + 1)
    off[n] = math.sqrt(2)
    return np.zeros(2 * n + 2), off


def column_hamiltonian(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("tree height must be >= 1")
    diag, off = column_hamiltonian_bands(n)
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


def column_projection(graph: GluedTreeGraph) -> np.ndarray:
    """<col i| A |col j> for the graph's adjacency A."""
    basis = graph.column_basis()
    return basis.T @ graph.adjacency() @ basis


class _ColumnPropagator:
    def __init__(self, n: int):
        diag, off = column_hamiltonian_bands(n)
        self.w, self.v = eigh_tridiagonal(diag, off)
        # components of |col 0> in the eigenbasis
        self.c0 = self.v[0].astype(complex)

    def amplitudes(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        phases = np.exp(-1j * np.outer(times, self.w))
        return (phases * self.c0[None, :]) @ self.v.T


def walk_amplitudes(n: int, times) -> np.ndarray:
    """Column amplitudes of exp(-iHt)|col 0> for each time, shape (len(times), 2n+2)."""
    return _ColumnPropagator(n).amplitudes(times)


class NodeView(str, enum.Enum):
    FULL_NODES = "full_nodes"
    ONE_PER_COLUMN = "one_per_column"
    COLUMNS = "columns"


@dataclass(eq=False)
class WalkTrace:
    n: int
    times: np.ndarray
    column_amps: np.ndarray

    @property
    def p_out(self) -> np.ndarray:
        return np.abs(self.column_amps[:, -1]) ** 2

    def __len__(self):
        return self.times.size


def evolve_walk(n: int, t_max: float, dt: float, stride: int = 1) -> WalkTrace:
    """Walk from the IN root, sampled at t = k dt (every ``stride``-th step) up to t_max."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n < 1:
        raise ValueError("tree height must be >= 1")
    steps = int(math.floor(t_max / dt + 1e-9))
    times = np.arange(0, steps + 1, max(1, stride)) * dt
    return WalkTrace(n, times, walk_amplitudes(n, times))


def walk_on_grid(n: int, times: Sequence[float]) -> WalkTrace:
    times = np.asarray(times, dtype=float)
    return WalkTrace(n, times, walk_amplitudes(n, times))


def first_peak(n: int, threshold: float = 1e-3, resolution: float = 1e-2,
               t_max: Optional[float] = None) -> Tuple[float, float]:
    """(time, value) of the first local maximum of p_out above ``threshold``.

    The threshold skips round-off wiggles while p_out is still ~1e-30.
    """
    prop = _ColumnPropagator(n)
    horizon = t_max if t_max is not None else 10.0 * (2 * n + 2)
    ts = np.arange(0.0, horizon + resolution, resolution)
    p = np.abs(prop.amplitudes(ts)[:, -1]) ** 2
    inner = (p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:]) & (p[1:-1] > threshold)
    hits = np.nonzero(inner)[0]
    if hits.size == 0:
        raise RuntimeError(f"no p_out peak above {threshold} before t={horizon}")
    i = hits[0] + 1
    res = minimize_scalar(lambda t: -abs(prop.amplitudes([t])[0, -1]) ** 2,
                          bounds=(ts[i - 1], ts[i + 1]), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def trace_to_first_peak(n: int, snapshots: int = 400) -> WalkTrace:
    """Uniform mesh of ``snapshots`` steps covering [0, t_peak]."""
    t_peak, _ = first_peak(n)
    return walk_on_grid(n, np.linspace(0.0, t_peak, snapshots + 1))


def node_view(trace: WalkTrace, n: int, mode: NodeView) -> List[ProbDist]:
    """Per-snapshot distributions for one of the three measurement views.

    FULL_NODES repeats each per-node probability |a_j|^2 / N_j over its N_j
    vertices; ONE_PER_COLUMN keeps one per-node value per column (not
    normalized); COLUMNS uses the column probabilities |a_j|^2.
    """
    if trace.n != n or trace.column_amps.shape[1] != 2 * n + 2:
        raise ValueError(f"trace was built for n={trace.n}, not n={n}")
    mode = NodeView(mode)
    sizes = column_sizes(n)
    probs = np.abs(trace.column_amps) ** 2
    probs = probs / probs.sum(axis=1, keepdims=True)
    if mode is NodeView.COLUMNS:
        return [ProbDist(p, tol=1e-8) for p in probs]
    per_node = probs / sizes[None, :]
    if mode is NodeView.ONE_PER_COLUMN:
        return [ProbDist(p, normalized=False) for p in per_node]
    return [ProbDist(np.repeat(p, sizes), tol=1e-8) for p in per_node]


# ---------------------------------------------------------------- full graph


def full_graph_amplitudes(graph: GluedTreeGraph, times) -> np.ndarray:
    """Vertex amplitudes of exp(-i A t / sqrt 2)|IN>, shape (len(times), V)."""
    w, v = np.linalg.eigh(graph.adjacency() / math.sqrt(2))
    times = np.atleast_1d(np.asarray(times, dtype=float))
    c0 = v[graph.in_id].astype(complex)
    return (np.exp(-1j * np.outer(times, w)) * c0[None, :]) @ v.T


def full_graph_deviation(graph: GluedTreeGraph, times) -> float:
    """Largest gap between the full-graph walk and the column walk lifted to vertices."""
    full = full_graph_amplitudes(graph, times)
    lifted = walk_amplitudes(graph.n, times) @ graph.column_basis().T
    return float(np.abs(full - lifted).max())


def full_graph_step_unitary(graph: GluedTreeGraph, dt: float) -> np.ndarray:
    """exp(-i A dt / sqrt 2) in the vertex basis."""
    w, v = np.linalg.eigh(graph.adjacency() / math.sqrt(2))
    return (v * np.exp(-1j * w * dt)) @ v.T
