"""Structural-equation models over a Dag: sampling and log-density.

The joint density factorizes as the product over nodes of the node's
conditional given its parents, so sampling walks the topological order
drawing each node from its mechanism.  Every node owns a random substream
keyed by its *name*, which makes the sampled joint invariant under node
declaration order and safe to shard.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .dsl import LinearGaussian, LogisticBinary, Mechanism, ModelDocument, TableCpd
from .errors import ScmError
from .graph import Dag


@dataclass(frozen=True)
class ScmSpec:
    dag: Dag
    mechanisms: dict[str, Mechanism]

    def __post_init__(self):
        for n in self.dag.nodes:
            if n not in self.mechanisms:
                raise ScmError(f"node {n!r} has no mechanism")
        for n in self.mechanisms:
            if n not in self.dag.nodes:
                raise ScmError(f"mechanism for unknown node {n!r}")
        for n, mech in self.mechanisms.items():
            parents = set(self.dag.parent_list(n))
            if isinstance(mech, (LinearGaussian, LogisticBinary)):
                keys = {k for k, _ in mech.weights}
                if keys != parents:
                    raise ScmError(
                        f"node {n!r}: weight keys {sorted(keys)} != parents {sorted(parents)}"
                    )
                if isinstance(mech, LinearGaussian) and mech.noise_sd <= 0:
                    raise ScmError(f"node {n!r}: noise_sd must be positive")
            else:
                if set(mech.given) != parents:
                    raise ScmError(
                        f"node {n!r}: given {sorted(mech.given)} != parents {sorted(parents)}"
                    )
                rows_needed = 1
                for p in mech.given:
                    rows_needed *= len(self._levels_of(p))
                if len(mech.table) != rows_needed:
                    raise ScmError(
                        f"node {n!r}: table has {len(mech.table)} rows, needs {rows_needed}"
                    )
                for row in mech.table:
                    if len(row) != len(mech.levels):
                        raise ScmError(f"node {n!r}: row width != level count")
                    if abs(sum(row) - 1.0) > 1e-9 or any(p < 0 for p in row):
                        raise ScmError(f"node {n!r}: rows must be probability vectors")

    def _levels_of(self, name: str) -> tuple[int, ...]:
        mech = self.mechanisms.get(name)
        if isinstance(mech, LogisticBinary):
            return (0, 1)
        if isinstance(mech, TableCpd):
            return mech.levels
        raise ScmError(f"node {name!r} must be discrete to parent a table mechanism")

    def is_discrete(self, name: str) -> bool:
        return isinstance(self.mechanisms[name], (LogisticBinary, TableCpd))


def from_document(doc: ModelDocument) -> ScmSpec:
    """Build the simulation spec from a document's scm blocks."""
    dag = Dag.from_document(doc)
    return ScmSpec(dag, doc.mechanism_map())


@dataclass
class Dataset:
    """Column store of sampled values; every column has length n."""

    columns: dict[str, np.ndarray]
    n: int
    seed: int | None = None

    def __post_init__(self):
        for name, col in self.columns.items():
            if len(col) != self.n:
                raise ValueError(f"column {name!r} has length {len(col)}, expected {self.n}")

    def names(self) -> list[str]:
        return list(self.columns)

    def require(self, names) -> None:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise KeyError(f"dataset lacks columns: {', '.join(missing)}")


def _node_rng(seed: int, name: str) -> np.random.Generator:
    # substream keyed by node name, not position, so declaration order is moot
    entropy = [seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF, *name.encode("utf-8")]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def sample(scm: ScmSpec, n: int, seed: int = 0) -> Dataset:
    """Ancestral sampling: draw nodes in topological order, parents first."""
    if n < 0:
        raise ValueError("sample count must be non-negative")
    cols: dict[str, np.ndarray] = {}
    for node in scm.dag.topological_order():
        mech = scm.mechanisms[node]
        rng = _node_rng(seed, node)
        if isinstance(mech, LinearGaussian):
            mean = np.full(n, mech.intercept, dtype=float)
            for parent, w in mech.weights:
                mean += w * cols[parent].astype(float)
            cols[node] = mean + rng.normal(0.0, mech.noise_sd, n)
        elif isinstance(mech, LogisticBinary):
            lin = np.full(n, mech.intercept, dtype=float)
            for parent, w in mech.weights:
                lin += w * cols[parent].astype(float)
            cols[node] = (rng.random(n) < _sigmoid(lin)).astype(np.int64)
        else:
            idx = np.zeros(n, dtype=np.int64)
            for parent in mech.given:  # leftmost parent varies slowest
                levels = scm._levels_of(parent)
                lookup = {v: i for i, v in enumerate(levels)}
                codes = np.array([lookup[int(v)] for v in cols[parent]], dtype=np.int64)
                idx = idx * len(levels) + codes
            table = np.asarray(mech.table, dtype=float)
            cum = np.cumsum(table[idx], axis=1)
            u = rng.random(n)
            picks = np.minimum((u[:, None] > cum).sum(axis=1), len(mech.levels) - 1)
            cols[node] = np.asarray(mech.levels, dtype=np.int64)[picks]
    ordered = {name: cols[name] for name in scm.dag.nodes}
    return Dataset(ordered, n, seed)


def log_density(scm: ScmSpec, record: dict[str, float]) -> float:
    """Sum of per-node log conditionals at a single fully-observed record."""
    for node in scm.dag.nodes:
        if node not in record:
            raise ScmError(f"record misses a value for {node!r}")
    total = 0.0
    for node in scm.dag.nodes:
        mech = scm.mechanisms[node]
        v = record[node]
        if isinstance(mech, LinearGaussian):
            mean = mech.intercept + sum(w * float(record[p]) for p, w in mech.weights)
            z = (float(v) - mean) / mech.noise_sd
            total += -0.5 * z * z - math.log(mech.noise_sd) - 0.5 * math.log(2.0 * math.pi)
        elif isinstance(mech, LogisticBinary):
            if v not in (0, 1):
                raise ScmError(f"node {node!r}: binary value must be 0 or 1, got {v!r}")
            lin = mech.intercept + sum(w * float(record[p]) for p, w in mech.weights)
            # log sigmoid computed stably on both branches
            if v == 1:
                total += -math.log1p(math.exp(-lin)) if lin >= 0 else lin - math.log1p(math.exp(lin))
            else:
                total += -lin - math.log1p(math.exp(-lin)) if lin >= 0 else -math.log1p(math.exp(lin))
        else:
            if int(v) != v or int(v) not in mech.levels:
                raise ScmError(f"node {node!r}: value {v!r} outside levels {mech.levels}")
            idx = 0
            for parent in mech.given:
                levels = scm._levels_of(parent)
                pv = record[parent]
                if int(pv) != pv or int(pv) not in levels:
                    raise ScmError(f"node {parent!r}: value {pv!r} outside levels {levels}")
                idx = idx * len(levels) + levels.index(int(pv))
            p = mech.table[idx][mech.levels.index(int(v))]
            total += math.log(p) if p > 0 else float("-inf")
    return total


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------


def to_csv(data: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = data.names()
    writer.writerow(names)
    cols = [data.columns[n] for n in names]
    ints = [np.issubdtype(c.dtype, np.integer) for c in cols]
    for i in range(data.n):
        writer.writerow(
            [int(c[i]) if isint else format(float(c[i]), ".17g") for c, isint in zip(cols, ints)]
        )
    return buf.getvalue()


def from_csv(text: str) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise ValueError("empty CSV input")
    header = rows[0]
    raw: dict[str, list[str]] = {name: [] for name in header}
    for row in rows[1:]:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        for name, cell in zip(header, row):
            raw[name].append(cell)
    columns: dict[str, np.ndarray] = {}
    for name, cells in raw.items():
        try:
            columns[name] = np.asarray([int(c) for c in cells], dtype=np.int64)
        except ValueError:
            columns[name] = np.asarray([float(c) for c in cells], dtype=float)
    return Dataset(columns, len(rows) - 1)
