"""B-bit symmetric uniform DAC model and its single-bit decomposition.

A B-bit DAC maps each real dimension onto 2^B uniformly spaced labels
(odd multiples of half the step, mid-rise, no zero level). Any such
output can also be written as a weighted sum of B independent one-bit
outputs; the weights and the block matrix combining them are what the
lifted precoding formulation consumes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

MAX_BITS = 8
ENUMERATION_GUARD = 24


@dataclass(frozen=True)
class QuantizerSpec:
    """Immutable description of one B-bit uniform DAC per real dimension.

    thresholds : decision boundaries, length 2^B - 1, strictly increasing
    labels     : output levels, length 2^B, symmetric around zero
    weights    : one-bit combination weights, length B, unit sum of squares
    """

    bits: int
    step: float
    thresholds: np.ndarray
    labels: np.ndarray
    weights: np.ndarray

    @property
    def lift_dim(self) -> int:
        """Number of one-bit branches per real dimension."""
        return self.bits


def decomposition_weights(bits: int) -> np.ndarray:
    """Weights combining B one-bit outputs into one B-bit output.

    The m-th weight is 2^(m-1) normalized so the squares sum to one,
    which reproduces the uniform label grid exactly (binary place
    values). For 2 bits this is (1, 2)/sqrt(5), for 3 bits (1, 2, 4)/sqrt(21).
    """
    if not 1 <= bits <= MAX_BITS:
        raise ValueError(f"bits must be in [1, {MAX_BITS}], got {bits}")
    raw = 2.0 ** np.arange(bits)
    return raw / np.sqrt(np.sum(raw**2))


def build_uniform_quantizer(bits: int, step: float) -> QuantizerSpec:
    """Construct the symmetric mid-rise uniform quantizer.

    Thresholds sit at step * (b - 2^(B-1)) for b = 1 .. 2^B - 1 and the
    labels are the cell midpoints, i.e. the odd multiples of step/2 up
    to (2^B - 1) * step / 2. Inputs beyond the outermost thresholds clip
    to the extreme labels.
    """
    if not 1 <= bits <= MAX_BITS:
        raise ValueError(f"bits must be in [1, {MAX_BITS}], got {bits}")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    levels = 2**bits
    b = np.arange(1, levels, dtype=float)
    thresholds = step * (b - levels / 2)
    labels = np.empty(levels)
    labels[:-1] = thresholds - step / 2
    labels[-1] = (levels - 1) * step / 2
    return QuantizerSpec(
        bits=bits,
        step=float(step),
        thresholds=thresholds,
        labels=labels,
        weights=decomposition_weights(bits),
    )


def quantize(z: np.ndarray | complex | float, spec: QuantizerSpec) -> np.ndarray:
    """Quantize elementwise; real and imaginary parts independently.

    Values equal to a threshold round toward the upper cell.
    """
    z = np.asarray(z)
    if np.any(np.isnan(z.real)) or np.any(np.isnan(z.imag)):
        raise ValueError("quantize received NaN input")

    def _q(x):
        cells = np.digitize(x, spec.thresholds)
        return spec.labels[cells]

    if np.iscomplexobj(z):
        return _q(z.real) + 1j * _q(z.imag)
    return _q(z)


def lift_matrix(n_tx: int, spec: QuantizerSpec) -> np.ndarray:
    """Block matrix combining 2*N*B one-bit branches into 2*N outputs.

    Horizontal concatenation [w_1 I, w_2 I, ..., w_B I] with identity
    size 2*N; right-multiplying a stacked sign vector yields the real
    image of the DAC output (up to the step/2 magnitude).
    """
    if n_tx < 1:
        raise ValueError(f"n_tx must be >= 1, got {n_tx}")
    eye = np.eye(2 * n_tx)
    return np.hstack([w * eye for w in spec.weights])


def reachable_labels(spec: QuantizerSpec, n_tx: int) -> np.ndarray:
    """Per-coordinate value set of {C v : v in {+-step/2}^(2NB)}, sorted.

    Coordinates decouple because the lift matrix is built from scaled
    identities, so each coordinate ranges over the 2^B signed weight
    combinations regardless of n_tx.
    """
    dim = 2 * n_tx * spec.bits
    if dim > ENUMERATION_GUARD:
        raise ValueError(
            f"enumeration guard: 2*n_tx*bits = {dim} exceeds {ENUMERATION_GUARD}"
        )
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=spec.bits)))
    values = (spec.step / 2) * signs @ spec.weights
    return np.unique(values)
