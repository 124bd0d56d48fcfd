"""Gray-coded constellations and hard-decision demodulation.

Conventions (frozen by golden tests):

* QPSK: bits (b0, b1) map to ((1-2*b0) + 1j*(1-2*b1)) / sqrt(2), so
  (0, 0) lands on (1+1j)/sqrt(2) and each bit controls one axis sign.
* 8PSK: position p on the unit circle at angle 2*pi*p/8 carries the
  binary-reflected Gray label of p (MSB first).
* 16QAM: two bits per axis with Gray order 00, 01, 11, 10 mapped onto
  levels -3, -1, +1, +3, normalized by sqrt(10); first two bits drive
  the real axis.

All constellations have unit average symbol energy. Decisions are
nearest-neighbor; exact ties resolve toward the lexicographically
smallest bit label.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SCHEMES = ("QPSK", "8PSK", "16QAM")


@dataclass(frozen=True)
class ConstellationSpec:
    """Constellation points with their bit labels.

    Points are ordered by lexicographic bit label so that the first
    nearest-neighbor hit is the tie-break winner.
    """

    scheme: str
    points: np.ndarray
    bit_map: np.ndarray

    @property
    def bits_per_symbol(self) -> int:
        return self.bit_map.shape[1]


def _gray(value: int) -> int:
    return value ^ (value >> 1)


def _bits_of(value: int, width: int) -> list[int]:
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def _sorted_by_label(points, labels, scheme):
    order = np.lexsort(np.asarray(labels).T[::-1])
    return ConstellationSpec(
        scheme=scheme,
        points=np.asarray(points)[order],
        bit_map=np.asarray(labels, dtype=int)[order],
    )


@lru_cache(maxsize=None)
def constellation(scheme: str) -> ConstellationSpec:
    """Unit-energy Gray-coded constellation for one scheme."""
    if scheme == "QPSK":
        points, labels = [], []
        for b0 in (0, 1):
            for b1 in (0, 1):
                points.append(((1 - 2 * b0) + 1j * (1 - 2 * b1)) / np.sqrt(2))
                labels.append([b0, b1])
        return _sorted_by_label(points, labels, scheme)
    if scheme == "8PSK":
        points, labels = [], []
        for pos in range(8):
            points.append(np.exp(2j * np.pi * pos / 8))
            labels.append(_bits_of(_gray(pos), 3))
        return _sorted_by_label(points, labels, scheme)
    if scheme == "16QAM":
        gray_levels = {0b00: -3.0, 0b01: -1.0, 0b11: 1.0, 0b10: 3.0}
        points, labels = [], []
        for code_i, level_i in gray_levels.items():
            for code_q, level_q in gray_levels.items():
                points.append((level_i + 1j * level_q) / np.sqrt(10))
                labels.append(_bits_of(code_i, 2) + _bits_of(code_q, 2))
        return _sorted_by_label(points, labels, scheme)
    raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")


def modulate(bits: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Map a bit array onto constellation symbols, MSB-first per symbol."""
    bits = np.asarray(bits, dtype=int).ravel()
    bps = spec.bits_per_symbol
    if bits.size % bps:
        raise ValueError(
            f"bit count {bits.size} not divisible by {bps} bits/symbol"
        )
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError("bits must be 0 or 1")
    groups = bits.reshape(-1, bps)
    weights = 1 << np.arange(bps - 1, -1, -1)
    values = groups @ weights
    # spec.points is label-sorted, so the label value indexes directly
    label_values = spec.bit_map @ weights
    lookup = np.empty(1 << bps, dtype=int)
    lookup[label_values] = np.arange(spec.points.size)
    return spec.points[lookup[values]]


def demodulate(
    y: np.ndarray, beta: float, spec: ConstellationSpec
) -> np.ndarray:
    """Hard decisions on y / beta; returns the recovered bit array."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    y = np.atleast_1d(np.asarray(y)) / beta
    dist = np.abs(y[:, None] - spec.points[None, :]) ** 2
    nearest = np.argmin(dist, axis=1)
    return spec.bit_map[nearest].ravel()
