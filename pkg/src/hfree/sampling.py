"""Deterministic domain sampling.

Random points come from a splitmix64 generator (constants below), so the
sequence for a given (seed, samples, box) is bit-identical on every platform.
Grid sampling yields the tensor-product lattice; periodic axes drop the right
endpoint.
"""

from __future__ import annotations

from .fields import Chart

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """64-bit splitmix PRNG; next_float() is uniform on [0, 1)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # 53 high bits, as in the reference double conversion
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def random_points(chart: Chart, samples: int, seed: int) -> list[tuple[float, ...]]:
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = SplitMix64(seed)
    out = []
    for _ in range(samples):
        pt = tuple(lo + rng.next_float() * (hi - lo) for lo, hi in chart.box)
        out.append(pt)
    return out


def grid_points(chart: Chart, counts) -> list[tuple[float, ...]]:
    counts = list(counts)
    if len(counts) != chart.dim:
        raise ValueError("grid needs one count per axis")
    if any(c < 1 for c in counts):
        raise ValueError("grid counts must be positive")
    axes = []
    for (lo, hi), per, n in zip(chart.box, chart.periodic, counts):
        if per:
            axes.append([lo + i * (hi - lo) / n for i in range(n)])
        elif n == 1:
            axes.append([lo])
        else:
            axes.append([lo + i * (hi - lo) / (n - 1) for i in range(n)])
    out = [()]
    for axis in axes:
        out = [pt + (v,) for pt in out for v in axis]
    return out


def sample_points(chart: Chart, samples: int = 10000, seed: int = 0, grid=None):
    """Random points by default; the tensor-product lattice when grid counts
    are given."""
    if grid is not None:
        return grid_points(chart, grid)
    return random_points(chart, samples, seed)
