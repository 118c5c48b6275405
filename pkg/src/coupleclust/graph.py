"""Weighted graphs, Gilbert generators, and local coupling criteria.

An undirected weighted graph on n nodes is summarized by its weight matrix
``a`` (symmetric, nonnegative), degrees ``a_i = sum_j a[i, j]`` and total
weight ``2M = sum_ij a[i, j]``. Normalizing ``a / 2M`` as a joint
distribution over ordered node pairs, the two canonical couplings of its
margins yield two local null models and hence two centered criteria:

* independence:    ``m_x(i, j)  = a[i, j]/2M - a_i * a_j / (2M)**2``
* indetermination: ``m_+(i, j)  = a[i, j] - a_i/n - a_j/n + 2M/n**2``

whose subtracted biases are ``b_x = a_i * a_j / 2M`` and
``b_+ = a_i/n + a_j/n - 2M/n**2``. Both criteria sum to zero over all
ordered pairs. On Gilbert (Bernoulli edge) graphs the biases concentrate
around the edge probability ``eps``; this module carries the exact joint
law of ``(a_ij, a_i, a_j)`` under the idealized degree model, histogram
builders for the bias distributions (theoretical and sampled), and the
``eps``-parametrized bias ranges.

Graphs up to ``DENSE_CAP`` nodes are stored dense; larger ones fall back to
CSR so criterion evaluation never materializes an n x n criterion matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.stats import binom

from .errors import (
    DimensionMismatch,
    EdgeListParseError,
    EmptyGraph,
    NonPositiveDimension,
    ZeroEps,
)

__all__ = [
    "DENSE_CAP",
    "WeightedGraph",
    "BiasHistogram",
    "gilbert",
    "gilbert_weighted",
    "local_independence_criterion",
    "local_indetermination_criterion",
    "bias_independence",
    "bias_indetermination",
    "bias_bounds",
    "bias_bin_edges",
    "theoretical_joint_pmf",
    "theoretical_bias_difference_distribution",
    "theoretical_bias_histograms",
    "empirical_bias_samples",
    "empirical_bias_histogram",
    "empirical_bias_difference_histogram",
    "load_edge_list",
]

#: Node-count threshold above which weights are stored as CSR.
DENSE_CAP = 2048

_SAMPLER_CHUNK = 1024


class WeightedGraph:
    """Symmetric nonnegative weight matrix with cached degree data.

    Parameters
    ----------
    weights : numpy.ndarray or scipy.sparse matrix
        Square symmetric matrix of nonnegative reals. Dense input beyond
        ``DENSE_CAP`` nodes is converted to CSR.

    Attributes
    ----------
    n : int
    degrees : numpy.ndarray
        Row sums (read-only).
    total_weight_2m : float
        Sum of all entries, i.e. 2M.
    """

    __slots__ = ("_dense", "_csr", "n", "degrees", "total_weight_2m")

    def __init__(self, weights):
        if sparse.issparse(weights):
            mat = sparse.csr_array(weights)
            if mat.shape[0] != mat.shape[1]:
                raise DimensionMismatch("weight matrix must be square")
            if mat.nnz and mat.data.min() < 0:
                raise ValueError("weights must be nonnegative")
            if (mat - mat.T).nnz and abs((mat - mat.T)).max() > 0:
                raise ValueError("weights must be symmetric")
            self._dense = None
            self._csr = mat
            self.n = mat.shape[0]
            degrees = np.asarray(mat.sum(axis=1)).ravel().astype(float)
        else:
            arr = np.asarray(weights, dtype=float)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise DimensionMismatch("weight matrix must be square")
            if arr.size and arr.min() < 0:
                raise ValueError("weights must be nonnegative")
            if not np.array_equal(arr, arr.T):
                raise ValueError("weights must be symmetric")
            self.n = arr.shape[0]
            if self.n > DENSE_CAP:
                self._dense = None
                self._csr = sparse.csr_array(arr)
            else:
                arr = np.ascontiguousarray(arr)
                arr.flags.writeable = False
                self._dense = arr
                self._csr = None
            degrees = arr.sum(axis=1) if self._dense is not None else np.asarray(
                self._csr.sum(axis=1)
            ).ravel().astype(float)
        degrees = np.ascontiguousarray(degrees, dtype=float)
        degrees.flags.writeable = False
        self.degrees = degrees
        self.total_weight_2m = float(degrees.sum())

    @classmethod
    def from_edges(cls, n: int, edges) -> "WeightedGraph":
        """Build from an iterable of ``(i, j, weight)`` triples.

        Each undirected edge appears once; the matrix is symmetrized.
        """
        if n < 0:
            raise NonPositiveDimension("n must be >= 0")
        rows, cols, vals = [], [], []
        for i, j, w in edges:
            rows.append(i)
            cols.append(j)
            vals.append(w)
            if i != j:
                rows.append(j)
                cols.append(i)
                vals.append(w)
        mat = sparse.coo_array(
            (np.asarray(vals, dtype=float), (rows, cols)), shape=(n, n)
        ).tocsr()
        if n <= DENSE_CAP:
            return cls(mat.toarray())
        return cls(mat)

    @property
    def weights(self):
        """The stored matrix: dense ndarray up to ``DENSE_CAP``, else CSR."""
        return self._dense if self._dense is not None else self._csr

    def weight(self, i: int, j: int) -> float:
        if self._dense is not None:
            return float(self._dense[i, j])
        return float(self._csr[i, j])

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Indices and weights of nodes with nonzero weight to ``i``."""
        if self._dense is not None:
            row = self._dense[i]
            idx = np.nonzero(row)[0]
            return idx, row[idx]
        lo, hi = self._csr.indptr[i], self._csr.indptr[i + 1]
        return self._csr.indices[lo:hi], self._csr.data[lo:hi]

    def class_row_sums(self, members: np.ndarray) -> np.ndarray:
        """For each member node, its total weight to the member set."""
        if self._dense is not None:
            return self._dense[np.ix_(members, members)].sum(axis=1)
        sub = self._csr[members][:, members]
        return np.asarray(sub.sum(axis=1)).ravel().astype(float)

    def edge_list_text(self) -> str:
        """Tab-separated ``i j weight`` lines, each undirected edge once
        (upper triangle plus any diagonal), LF terminated."""
        lines = []
        if self._dense is not None:
            iu, iv = np.nonzero(np.triu(self._dense))
            for i, j in zip(iu.tolist(), iv.tolist()):
                lines.append(f"{i}\t{j}\t{float(self._dense[i, j])!r}")
        else:
            coo = sparse.triu(self._csr).tocoo()
            for i, j, w in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
                lines.append(f"{i}\t{j}\t{float(w)!r}")
        return "\n".join(lines) + ("\n" if lines else "")

    def save_edge_list(self, path) -> None:
        """Write :meth:`edge_list_text` to ``path``."""
        Path(path).write_text(self.edge_list_text())


def load_edge_list(path) -> WeightedGraph:
    """Load a tab-separated ``i j weight`` edge list.

    Indices are 0-based; each undirected edge is listed once and the loader
    symmetrizes. The node count is the largest index plus one. Blank lines
    are ignored; anything else malformed raises
    :class:`EdgeListParseError` with its 1-based line number. Duplicate
    unordered pairs are rejected rather than summed.
    """
    edges = []
    seen: set[tuple[int, int]] = set()
    n = 0
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise EdgeListParseError(
                f"line {lineno}: expected 'i<TAB>j<TAB>weight', got {raw!r}"
            )
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError as exc:
            raise EdgeListParseError(f"line {lineno}: {exc}") from exc
        if i < 0 or j < 0:
            raise EdgeListParseError(f"line {lineno}: negative node index")
        if w < 0:
            raise EdgeListParseError(f"line {lineno}: negative weight {w!r}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise EdgeListParseError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append((i, j, w))
        n = max(n, i + 1, j + 1)
    return WeightedGraph.from_edges(n, edges)


def _check_eps(eps: float, allow_zero: bool = True) -> None:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps!r}")
    if not allow_zero and eps == 0.0:
        raise ZeroEps("eps = 0 leaves the multiplicative bias unbounded")


def gilbert(
    n: int, eps: float, rng: np.random.Generator | int | None = None
) -> WeightedGraph:
    """Gilbert random graph: each of the n(n-1)/2 node pairs carries an
    edge of weight 1 independently with probability ``eps``. No self-loops.
    """
    if n < 1:
        raise NonPositiveDimension("n must be >= 1")
    _check_eps(eps)
    rng = np.random.default_rng(rng)
    iu, iv = np.triu_indices(n, 1)
    draw = rng.random(iu.size) < eps
    edges = [(int(i), int(j), 1.0) for i, j in zip(iu[draw], iv[draw])]
    return WeightedGraph.from_edges(n, edges)


def gilbert_weighted(
    n: int,
    eps: float,
    max_weight: int,
    rng: np.random.Generator | int | None = None,
) -> WeightedGraph:
    """Integer-weighted Gilbert graph: each pair's weight is an independent
    Binomial(``max_weight``, ``eps``) draw.

    ``max_weight=1`` reduces to the same edge distribution as
    :func:`gilbert` (though the two consume the random stream differently).
    """
    if n < 1:
        raise NonPositiveDimension("n must be >= 1")
    if max_weight < 1:
        raise NonPositiveDimension("max_weight must be >= 1")
    _check_eps(eps)
    rng = np.random.default_rng(rng)
    iu, iv = np.triu_indices(n, 1)
    w = rng.binomial(max_weight, eps, size=iu.size)
    nz = w > 0
    edges = [
        (int(i), int(j), float(x)) for i, j, x in zip(iu[nz], iv[nz], w[nz])
    ]
    return WeightedGraph.from_edges(n, edges)


def _require_edges(g: WeightedGraph) -> float:
    if g.total_weight_2m <= 0.0:
        raise EmptyGraph("graph has zero total weight")
    return g.total_weight_2m


def local_independence_criterion(g: WeightedGraph, i: int, j: int) -> float:
    """Centered edge evidence against the independence null:
    ``a[i,j]/2M - a_i * a_j / (2M)**2``."""
    two_m = _require_edges(g)
    return g.weight(i, j) / two_m - g.degrees[i] * g.degrees[j] / (two_m * two_m)


def local_indetermination_criterion(g: WeightedGraph, i: int, j: int) -> float:
    """Centered edge evidence against the indetermination null:
    ``a[i,j] - a_i/n - a_j/n + 2M/n**2``."""
    n = g.n
    return (
        g.weight(i, j)
        - g.degrees[i] / n
        - g.degrees[j] / n
        + g.total_weight_2m / (n * n)
    )


def bias_independence(g: WeightedGraph, i: int, j: int) -> float:
    """The independence null value ``a_i * a_j / 2M`` for pair (i, j)."""
    two_m = _require_edges(g)
    return g.degrees[i] * g.degrees[j] / two_m


def bias_indetermination(g: WeightedGraph, i: int, j: int) -> float:
    """The indetermination null value ``a_i/n + a_j/n - 2M/n**2``."""
    n = g.n
    return g.degrees[i] / n + g.degrees[j] / n - g.total_weight_2m / (n * n)


def bias_bounds(eps: float, n: int) -> tuple[tuple[float, float], tuple[float, float]]:
    """Attainable ranges of the two biases under the ``2M = n**2 * eps``
    convention.

    Returns ``((plus_low, plus_high), (times_low, times_high))`` =
    ``((-eps, 2 - eps), (0, 1/eps))``. The additive range is width 2
    regardless of ``eps``; the multiplicative range blows up as ``eps``
    shrinks, which is why ``eps = 0`` is rejected.

    Raises
    ------
    ZeroEps
        If ``eps == 0``.
    """
    if n < 1:
        raise NonPositiveDimension("n must be >= 1")
    _check_eps(eps, allow_zero=False)
    return ((-eps, 2.0 - eps), (0.0, 1.0 / eps))


def bias_bin_edges(eps: float, bins: int, which: str) -> np.ndarray:
    """Uniform bin edges spanning a theoretical bias range.

    ``which`` is one of ``"plus"``, ``"times"``, ``"difference"`` (for
    ``b_+ - b_x``) or ``"common"`` (union of the plus and times ranges, the
    grid both empirical histograms share so their shapes can be compared).
    """
    if bins < 1:
        raise NonPositiveDimension("bins must be >= 1")
    (plo, phi), (tlo, thi) = bias_bounds(eps, 2)
    spans = {
        "plus": (plo, phi),
        "times": (tlo, thi),
        "difference": (plo - thi, phi - tlo),
        "common": (min(plo, tlo), max(phi, thi)),
    }
    try:
        lo, hi = spans[which]
    except KeyError:
        raise ValueError(f"unknown histogram kind {which!r}") from None
    return np.linspace(lo, hi, bins + 1)


@dataclass(frozen=True)
class BiasHistogram:
    """A binned bias distribution.

    ``counts`` are sample counts for empirical histograms and probability
    masses for theoretical ones; ``which`` tags the quantity binned
    (``"independence"``, ``"indetermination"`` or ``"difference"``).
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    which: str

    def __post_init__(self):
        edges = np.ascontiguousarray(self.bin_edges, dtype=float)
        counts = np.ascontiguousarray(self.counts, dtype=float)
        if edges.ndim != 1 or counts.ndim != 1 or edges.size != counts.size + 1:
            raise DimensionMismatch("need len(bin_edges) == len(counts) + 1")
        edges.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def mean(self) -> float:
        """Mass-weighted mean of bin midpoints."""
        mids = 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])
        total = self.total
        if total == 0:
            return float("nan")
        return float((mids * self.counts).sum() / total)

    def csv_rows(self) -> list[tuple[float, float, float]]:
        return [
            (float(lo), float(hi), float(c))
            for lo, hi, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts)
        ]

    def to_json_dict(self) -> dict:
        return {
            "which": self.which,
            "bin_edges": [float(x) for x in self.bin_edges],
            "counts": [float(c) for c in self.counts],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def theoretical_joint_pmf(n: int, eps: float) -> np.ndarray:
    """Joint law of ``(a_ij, a_i, a_j)`` under the idealized degree model.

    Under that model, given the pair value ``b = a_ij``, each endpoint's
    degree is ``b`` plus an independent Binomial(n-1, eps) count::

        P(b, d_i, d_j) = eps**b * (1-eps)**(1-b)
                         * C(n-1, d_i-b) eps**(d_i-b) (1-eps)**(n-1-d_i+b)
                         * C(n-1, d_j-b) eps**(d_j-b) (1-eps)**(n-1-d_j+b)

    Degrees range over ``b..n`` here, one more than a loop-free graph
    realizes (its degrees stop at n-1); the formula is implemented exactly
    as stated and the off-by-one is a documented approximation of the
    sampled model.

    Returns
    -------
    numpy.ndarray
        Read-only array of shape (2, n+1, n+1); ``[b, d_i, d_j]`` indexes
        the mass. Sums to 1.
    """
    if n < 1:
        raise NonPositiveDimension("n must be >= 1")
    if not 0.0 < eps <= 1.0:
        if eps == 0.0:
            raise ZeroEps("eps must be positive")
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")
    k = np.arange(n + 1)
    row0 = binom.pmf(k, n - 1, eps)
    row1 = binom.pmf(k - 1, n - 1, eps)
    mass = np.stack(
        [(1.0 - eps) * np.outer(row0, row0), eps * np.outer(row1, row1)]
    )
    mass.flags.writeable = False
    return mass


def _bias_grids(n: int, eps: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(b_plus, b_times, mass-over-b) grids on the (d_i, d_j) lattice."""
    mass = theoretical_joint_pmf(n, eps)
    d = np.arange(n + 1, dtype=float)
    di = d[:, None]
    dj = d[None, :]
    b_plus = di / n + dj / n - eps
    b_times = di * dj / (n * n * eps)
    return b_plus, b_times, mass[0] + mass[1]


def _mass_histogram(
    values: np.ndarray, weights: np.ndarray, edges: np.ndarray, which: str
) -> BiasHistogram:
    clipped = np.clip(values.ravel(), edges[0], edges[-1])
    counts, _ = np.histogram(clipped, bins=edges, weights=weights.ravel())
    return BiasHistogram(bin_edges=edges, counts=counts, which=which)


def theoretical_bias_difference_distribution(
    n: int, eps: float, bins: int = 200
) -> BiasHistogram:
    """Exact distribution of ``b_+ - b_x`` under the idealized degree model
    with the ``2M = n**2 * eps`` convention, binned on the theoretical
    difference range.

    The difference collapses to ``-x*y / (n**2 * eps)`` with ``x, y`` the
    centered degrees, so its mass concentrates near 0 at rate 1/n.
    """
    b_plus, b_times, weights = _bias_grids(n, eps)
    edges = bias_bin_edges(eps, bins, "difference")
    return _mass_histogram(b_plus - b_times, weights, edges, "difference")


def theoretical_bias_histograms(
    n: int, eps: float, bins: int = 200
) -> tuple[BiasHistogram, BiasHistogram]:
    """Marginal distributions of ``b_x`` and ``b_+`` under the idealized
    degree model, binned on the shared grid.

    Returns ``(times_hist, plus_hist)``.
    """
    b_plus, b_times, weights = _bias_grids(n, eps)
    edges = bias_bin_edges(eps, bins, "common")
    return (
        _mass_histogram(b_times, weights, edges, "independence"),
        _mass_histogram(b_plus, weights, edges, "indetermination"),
    )


def _bias_stream(
    n: int,
    eps: float,
    m: int,
    rng: np.random.Generator,
    use_realized_2m: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample ``m`` (b_x, b_+, b_+ - b_x) triples, one random ordered node
    pair from each of ``m`` fresh Gilbert graphs. Samples whose graph came
    up empty are dropped from the ``b_x`` and difference arrays (the ratio
    is undefined there)."""
    iu, iv = np.triu_indices(n, 1)
    n_pairs = iu.size
    incidence = np.zeros((n_pairs, n))
    rows = np.arange(n_pairs)
    incidence[rows, iu] = 1.0
    incidence[rows, iv] = 1.0
    edge_of = np.zeros((n, n), dtype=np.int64)
    edge_of[iu, iv] = rows
    edge_of[iv, iu] = rows

    times_parts: list[np.ndarray] = []
    plus_parts: list[np.ndarray] = []
    diff_parts: list[np.ndarray] = []
    remaining = m
    while remaining > 0:
        batch = min(_SAMPLER_CHUNK, remaining)
        remaining -= batch
        bern = (rng.random((batch, n_pairs)) < eps).astype(float)
        deg = bern @ incidence
        two_m = 2.0 * bern.sum(axis=1)
        i = rng.integers(0, n, size=batch)
        j = rng.integers(0, n - 1, size=batch)
        j = j + (j >= i)
        sel = np.arange(batch)
        d_i = deg[sel, i]
        d_j = deg[sel, j]
        m2 = two_m if use_realized_2m else np.full(batch, n * n * eps)
        plus = d_i / n + d_j / n - m2 / (n * n)
        plus_parts.append(plus)
        nonempty = m2 > 0
        times = d_i[nonempty] * d_j[nonempty] / m2[nonempty]
        times_parts.append(times)
        diff_parts.append(plus[nonempty] - times)
    return (
        np.concatenate(times_parts),
        np.concatenate(plus_parts),
        np.concatenate(diff_parts),
    )


def empirical_bias_samples(
    n: int,
    eps: float,
    samples: int,
    rng: np.random.Generator | int | None = None,
    use_realized_2m: bool = True,
    n_streams: int = 1,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sampled bias values over fresh Gilbert graphs.

    For each of ``samples`` independent Gilbert(n, eps) graphs, one ordered
    node pair (i, j), i != j, is drawn uniformly and both biases recorded.

    Parameters
    ----------
    n : int
        Node count, >= 2.
    eps : float
        Edge probability in [0, 1].
    samples : int
        Number of graphs (one pair each).
    rng : numpy.random.Generator or int, optional
    use_realized_2m : bool
        With True (default) biases use each graph's realized total weight;
        with False they use the ``n**2 * eps`` convention of the
        theoretical formulas.
    n_streams : int
        Deterministic substream count (see :mod:`coupleclust._mc`).

    Returns
    -------
    (b_times, b_plus, b_diff) : tuple of numpy.ndarray
        ``b_plus`` has length ``samples``; ``b_times`` omits samples whose
        graph had zero weight (its denominator), so it may be shorter, and
        ``b_diff`` is the paired ``b_plus - b_times`` over those same
        retained samples.
    """
    if n < 2:
        raise NonPositiveDimension("need n >= 2 to draw a node pair")
    if samples < 1:
        raise NonPositiveDimension("samples must be >= 1")
    _check_eps(eps)
    from ._mc import run_streams

    chunks = run_streams(
        lambda gen, m: _bias_stream(n, eps, m, gen, use_realized_2m),
        samples,
        rng,
        n_streams,
    )
    times = np.concatenate([c[0] for c in chunks])
    plus = np.concatenate([c[1] for c in chunks])
    diff = np.concatenate([c[2] for c in chunks])
    return times, plus, diff


def empirical_bias_histogram(
    n: int,
    eps: float,
    samples: int,
    bins: int = 200,
    rng: np.random.Generator | int | None = None,
    use_realized_2m: bool = True,
    n_streams: int = 1,
) -> tuple[BiasHistogram, BiasHistogram]:
    """Histograms of sampled ``b_x`` and ``b_+`` on their shared bin grid.

    Returns ``(times_hist, plus_hist)``; see :func:`empirical_bias_samples`
    for the sampling scheme. The grid spans the union of the two theoretical
    ranges; out-of-range samples (possible for ``b_x`` under the
    realized-2M convention when a graph comes up sparse) are clipped into
    the edge bins so no mass is dropped. ``eps = 0`` yields an all-zero
    ``b_x`` histogram: every graph is empty, so every sample is dropped.
    """
    if eps == 0.0:
        # Degenerate but well-defined: b_+ is identically 0; use the
        # narrowest nonempty grid around it.
        edges = np.linspace(-1.0, 1.0, bins + 1)
    else:
        edges = bias_bin_edges(eps, bins, "common")
    times, plus, _ = empirical_bias_samples(
        n, eps, samples, rng, use_realized_2m, n_streams
    )
    times_hist = _mass_histogram(times, np.ones(times.size), edges, "independence")
    plus_hist = _mass_histogram(plus, np.ones(plus.size), edges, "indetermination")
    return times_hist, plus_hist


def empirical_bias_difference_histogram(
    n: int,
    eps: float,
    samples: int,
    bins: int = 200,
    rng: np.random.Generator | int | None = None,
    use_realized_2m: bool = True,
    n_streams: int = 1,
) -> BiasHistogram:
    """Histogram of the paired sampled difference ``b_+ - b_x``.

    Sampling matches :func:`empirical_bias_samples`; samples whose graph
    came up empty are dropped (``b_x`` is undefined there). Binned on the
    theoretical difference range, out-of-range values clipped into the edge
    bins. The realized-2M convention (the default) makes this an
    approximation of :func:`theoretical_bias_difference_distribution`,
    which fixes ``2M = n**2 * eps``.
    """
    edges = bias_bin_edges(eps, bins, "difference")
    _, _, diff = empirical_bias_samples(
        n, eps, samples, rng, use_realized_2m, n_streams
    )
    return _mass_histogram(diff, np.ones(diff.size), edges, "difference")
