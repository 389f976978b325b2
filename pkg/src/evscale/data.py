"""Data generation and preparation.

Simulators for the Poisson-process and truncated-normal experiment
designs, inverse-cdf GEV sampling, block-maxima extraction, threshold
selection, runs declustering and delimited-text ingestion.  All
simulators are deterministic given their seed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import GevParams, PpParams, SHAPE_EPS, gev_quantile
from .errors import DomainError, UsageError

__all__ = [
    "Series",
    "ExceedanceSet",
    "simulate_pp",
    "process_block_maxima",
    "simulate_truncated_normal",
    "simulate_gev",
    "block_maxima",
    "largest_k",
    "threshold_at_quantile",
    "decluster_runs",
    "read_series",
    "write_series",
]


@dataclass(frozen=True)
class Series:
    """An ordered batch of observations with optional block metadata."""

    values: np.ndarray
    block_length: int | None = None
    units: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise UsageError(f"a series must be one-dimensional, got shape {vals.shape}")
        if vals.size and not np.all(np.isfinite(vals)):
            raise DomainError("series values must be finite")
        object.__setattr__(self, "values", vals)
        if self.block_length is not None and self.block_length < 1:
            raise DomainError(f"block length must be >= 1, got {self.block_length}")

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class ExceedanceSet:
    """Strict exceedances of a threshold, with provenance counts.

    ``positions`` (when the set comes from a process simulation) are the
    time coordinates in (0, 1); block j of ``n_blocks`` is the slice
    [j/n_blocks, (j+1)/n_blocks).
    """

    exceedances: np.ndarray
    threshold: float
    n_total: int
    n_blocks: float
    positions: np.ndarray | None = None

    def __post_init__(self):
        exc = np.asarray(self.exceedances, dtype=float)
        object.__setattr__(self, "exceedances", exc)
        if exc.size and np.any(exc <= self.threshold):
            bad = exc[exc <= self.threshold][0]
            raise DomainError(
                f"exceedance {bad} does not exceed the threshold {self.threshold}"
            )
        if self.positions is not None:
            pos = np.asarray(self.positions, dtype=float)
            if pos.shape != exc.shape:
                raise UsageError("positions must align with exceedances")
            object.__setattr__(self, "positions", pos)

    def __len__(self):
        return self.exceedances.size


# ---------------------------------------------------------------------------
# Simulators
# ---------------------------------------------------------------------------

def simulate_pp(
    p: PpParams, total_intensity: float, seed, fixed_count: bool = False
) -> ExceedanceSet:
    """Simulate a nonhomogeneous Poisson process of threshold exceedances.

    The threshold is fixed by the parameters so that the expected number
    of points over the whole window equals ``total_intensity``; the point
    count is Poisson (or exactly ``round(total_intensity)`` with
    ``fixed_count=True``, for largest-k style designs), positions are
    uniform on (0, 1) and magnitudes are drawn by inverting the
    normalized intensity tail above the threshold.
    """
    if not (np.isfinite(total_intensity) and total_intensity > 0):
        raise DomainError(f"total intensity must be positive, got {total_intensity}")
    rng = np.random.default_rng(seed)
    ratio = total_intensity / p.n_blocks
    if abs(p.shape) < SHAPE_EPS:
        u = p.loc - p.scale * np.log(ratio)
        sigma_u = p.scale
    else:
        tu = ratio ** (-p.shape)  # solves n_blocks * tu**(-1/shape) = total_intensity
        u = p.loc + p.scale * (tu - 1.0) / p.shape
        sigma_u = p.scale * tu
    count = int(round(total_intensity)) if fixed_count else int(rng.poisson(total_intensity))
    v = rng.random(count)  # conditional survival probabilities
    if abs(p.shape) < SHAPE_EPS:
        mags = u - sigma_u * np.log(v)
    else:
        mags = u + sigma_u * np.expm1(-p.shape * np.log(v)) / p.shape
    positions = rng.random(count)
    return ExceedanceSet(
        exceedances=mags,
        threshold=float(u),
        n_total=count,
        n_blocks=p.n_blocks,
        positions=positions,
    )


def process_block_maxima(e: ExceedanceSet) -> Series:
    """Per-block maxima of a simulated exceedance process.

    Blocks with no exceedance are dropped (their maximum is censored
    below the threshold); a warning reports how many.
    """
    if e.positions is None:
        raise UsageError("block maxima need point positions; simulate the process first")
    n_blocks = int(e.n_blocks)
    idx = np.minimum((e.positions * n_blocks).astype(int), n_blocks - 1)
    maxima = np.full(n_blocks, -np.inf)
    np.maximum.at(maxima, idx, e.exceedances)
    empty = int(np.sum(~np.isfinite(maxima)))
    if empty:
        warnings.warn(f"{empty} of {n_blocks} blocks contain no exceedance; dropped")
    return Series(values=maxima[np.isfinite(maxima)])


def simulate_truncated_normal(n: int, seed) -> Series:
    """Draws with distribution function 2*Phi(x) - 1 on x > 0, by inversion."""
    if n < 1:
        raise UsageError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return Series(values=special.ndtri(0.5 * (1.0 + u)))


def simulate_gev(p: GevParams, n: int, seed) -> Series:
    """Inverse-cdf sampling from a GEV law."""
    if n < 1:
        raise UsageError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return Series(values=np.atleast_1d(gev_quantile(u, p)))


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

def _series_values(s) -> np.ndarray:
    return s.values if isinstance(s, Series) else np.asarray(s, dtype=float)


def block_maxima(s, block_length: int) -> Series:
    """Maxima of consecutive disjoint blocks.

    A trailing partial block is dropped (its maximum is stochastically
    smaller and would bias fits); a warning counts the dropped points.
    """
    vals = _series_values(s)
    if block_length < 1:
        raise DomainError(f"block length must be >= 1, got {block_length}")
    n_blocks, rem = divmod(vals.size, block_length)
    if n_blocks == 0:
        raise UsageError(
            f"series of length {vals.size} is shorter than one block ({block_length})"
        )
    if rem:
        warnings.warn(f"dropped a trailing partial block of {rem} observations")
    maxima = vals[: n_blocks * block_length].reshape(n_blocks, block_length).max(axis=1)
    return Series(values=maxima, block_length=None, units=getattr(s, "units", ""))


def largest_k(s, k: int) -> ExceedanceSet:
    """Keep the k largest observations; the threshold is the (n-k)th order
    statistic, so strict exceedances number exactly k when values are
    distinct (ties reduce the count).  Requires 1 <= k < n."""
    vals = _series_values(s)
    n = vals.size
    if not 1 <= k < n:
        raise UsageError(f"need 1 <= k < n = {n}, got k = {k}")
    ordered = np.sort(vals)
    threshold = float(ordered[n - k - 1])
    exc = vals[vals > threshold]
    return ExceedanceSet(
        exceedances=exc, threshold=threshold, n_total=n, n_blocks=float(exc.size)
    )


def threshold_at_quantile(s, q: float) -> ExceedanceSet:
    """Strict exceedances of the empirical q-quantile (type-7 linear
    interpolation, numpy's default)."""
    vals = _series_values(s)
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile must lie in (0, 1), got {q}")
    threshold = float(np.quantile(vals, q))
    exc = vals[vals > threshold]
    return ExceedanceSet(
        exceedances=exc, threshold=threshold, n_total=vals.size, n_blocks=float(exc.size)
    )


def decluster_runs(s, threshold: float, run_gap: int) -> ExceedanceSet:
    """Runs declustering: consecutive exceedances separated by fewer than
    ``run_gap`` sub-threshold observations share a cluster; one maximum is
    kept per cluster."""
    vals = _series_values(s)
    if run_gap < 1:
        raise DomainError(f"run gap must be >= 1, got {run_gap}")
    idx = np.flatnonzero(vals > threshold)
    maxima = []
    cluster_max = None
    last = None
    for i in idx:
        if last is not None and i - last - 1 >= run_gap:
            maxima.append(cluster_max)
            cluster_max = None
        cluster_max = vals[i] if cluster_max is None else max(cluster_max, vals[i])
        last = i
    if cluster_max is not None:
        maxima.append(cluster_max)
    exc = np.asarray(maxima, dtype=float)
    return ExceedanceSet(
        exceedances=exc, threshold=threshold, n_total=vals.size, n_blocks=float(exc.size)
    )


# ---------------------------------------------------------------------------
# Delimited text I/O
# ---------------------------------------------------------------------------

def read_series(path, column=0, delimiter: str = ",") -> Series:
    """Parse one numeric column from a headered delimited file.

    ``column`` may be an index or a header name.  Non-numeric rows are
    rejected with their line number.  Block metadata is read from an
    optional ``<path>.meta`` sidecar of ``key=value`` lines
    (``block_length``, ``units``).
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines:
        raise UsageError(f"{path}: empty file")
    header = [name.strip() for name in lines[0].split(delimiter)]
    if isinstance(column, str):
        try:
            col = header.index(column)
        except ValueError:
            raise UsageError(f"{path}: no column named {column!r} in header {header}")
    else:
        col = int(column)
        if not 0 <= col < len(header):
            raise UsageError(f"{path}: column index {col} outside header {header}")
    values = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(delimiter)
        if col >= len(fields):
            raise UsageError(f"{path}:{lineno}: fewer than {col + 1} fields")
        try:
            values.append(float(fields[col]))
        except ValueError:
            raise UsageError(
                f"{path}:{lineno}: non-numeric value {fields[col]!r} in column {header[col]!r}"
            )
    block_length = None
    units = ""
    meta = _read_meta(str(path) + ".meta")
    if "block_length" in meta:
        block_length = int(meta["block_length"])
    units = meta.get("units", "")
    return Series(values=np.asarray(values), block_length=block_length, units=units)


def write_series(path, s: Series, column_name: str = "value", delimiter: str = ","):
    """Write a series as a one-column headered file (full float precision),
    plus a ``<path>.meta`` sidecar when block metadata is present."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(column_name + "\n")
        for v in s.values:
            fh.write(repr(float(v)) + "\n")
    if s.block_length is not None or s.units:
        with open(str(path) + ".meta", "w", encoding="utf-8") as fh:
            if s.block_length is not None:
                fh.write(f"block_length={s.block_length}\n")
            if s.units:
                fh.write(f"units={s.units}\n")


def _read_meta(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            pairs = [ln.split("=", 1) for ln in fh if "=" in ln]
        return {k.strip(): v.strip() for k, v in pairs}
    except FileNotFoundError:
        return {}
