"""Product and coupled bases for three ionic qubits and the composite index layout.

Product (computational) basis order, ion A least significant::

    |000>, |100>, |010>, |110>, |001>, |101>, |011>, |111>

Coupled basis order::

    |3,-3>, |3,-1>, |3,1>, |3,3>, |1,-1>_1, |1,1>_1, |1,-1>_2, |1,1>_2

The composite ions-plus-mode space used for entanglement analysis has
dimensions (2, 2, 2, 4) for subsystems A, B, C, D and is flattened
A-major: ``16*i1 + 8*i2 + 4*i3 + d``.  Note that this differs from the
8-dimensional product order above, where ion A is the least significant bit.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

NORM_TOL = 1e-12
COMPOSITE_DIMS = (2, 2, 2, 4)


class ProductLabel(NamedTuple):
    i1: int
    i2: int
    i3: int

    @property
    def excitations(self) -> int:
        return self.i1 + self.i2 + self.i3


class CoupledLabel(NamedTuple):
    sigma: int
    sigma_z: int
    branch: int = 1


PRODUCT_LABELS = tuple(ProductLabel(i & 1, (i >> 1) & 1, (i >> 2) & 1) for i in range(8))

COUPLED_LABELS = (
    CoupledLabel(3, -3),
    CoupledLabel(3, -1),
    CoupledLabel(3, 1),
    CoupledLabel(3, 3),
    CoupledLabel(1, -1, 1),
    CoupledLabel(1, 1, 1),
    CoupledLabel(1, -1, 2),
    CoupledLabel(1, 1, 2),
)

# Indices of the sigma=3 quadruplet in COUPLED_LABELS.
SIGMA3 = (0, 1, 2, 3)
SIGMA1 = (4, 5, 6, 7)


def product_index(i1: int, i2: int, i3: int) -> int:
    """Position of |i1 i2 i3> in the product basis order."""
    for v in (i1, i2, i3):
        if v not in (0, 1):
            raise ValidationError(f"ion occupation must be 0 or 1, got {v}")
    return i1 + 2 * i2 + 4 * i3


@lru_cache(maxsize=None)
def _transform() -> np.ndarray:
    r3, r2, r6 = 1 / np.sqrt(3), 1 / np.sqrt(2), 1 / np.sqrt(6)
    r23 = np.sqrt(2 / 3)
    T = np.array(
        [
            [1, 0, 0, 0, 0, 0, 0, 0],
            [0, r3, r3, 0, r3, 0, 0, 0],
            [0, 0, 0, r3, 0, r3, r3, 0],
            [0, 0, 0, 0, 0, 0, 0, 1],
            [0, r6, r6, 0, -r23, 0, 0, 0],
            [0, 0, 0, r23, 0, -r6, -r6, 0],
            [0, r2, -r2, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, r2, -r2, 0],
        ],
        dtype=float,
    )
    T.setflags(write=False)
    return T


def coupled_transform() -> np.ndarray:
    """Real orthogonal 8x8 matrix taking product-basis amplitudes to coupled-basis ones.

    Rows follow ``COUPLED_LABELS``, columns follow ``PRODUCT_LABELS``.
    The returned array is read-only.
    """
    return _transform()


def _check_normalized(v: np.ndarray, size: int) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (size,):
        raise ValidationError(f"expected a vector of length {size}, got shape {v.shape}")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"state is not normalized (|v| = {norm!r})")
    return v


def product_to_coupled(v) -> np.ndarray:
    v = _check_normalized(v, 8)
    return coupled_transform() @ v


def coupled_to_product(v) -> np.ndarray:
    v = _check_normalized(v, 8)
    return coupled_transform().T @ v


def w_states() -> tuple[np.ndarray, np.ndarray]:
    """Product-basis vectors of |W1> (one excitation) and |W2> (two excitations)."""
    w1 = np.zeros(8)
    w2 = np.zeros(8)
    for idx, lab in enumerate(PRODUCT_LABELS):
        if lab.excitations == 1:
            w1[idx] = 1 / np.sqrt(3)
        elif lab.excitations == 2:
            w2[idx] = 1 / np.sqrt(3)
    return w1, w2


def symmetric_states() -> np.ndarray:
    """Rows: |000>, |W1>, |W2>, |111> in the product basis."""
    w1, w2 = w_states()
    out = np.zeros((4, 8))
    out[0, 0] = 1.0
    out[1] = w1
    out[2] = w2
    out[3, 7] = 1.0
    return out


def composite_index(i1: int, i2: int, i3: int, d: int) -> int:
    for name, v, hi in (("i1", i1, 1), ("i2", i2, 1), ("i3", i3, 1), ("d", d, 3)):
        if not isinstance(v, (int, np.integer)) or not 0 <= v <= hi:
            raise ValidationError(f"{name} must be an integer in [0, {hi}], got {v!r}")
    return 16 * i1 + 8 * i2 + 4 * i3 + d


def composite_label(index: int) -> tuple[int, int, int, int]:
    """Inverse of :func:`composite_index`."""
    if not 0 <= index < 32:
        raise ValidationError(f"composite index out of range: {index}")
    return (index >> 4) & 1, (index >> 3) & 1, (index >> 2) & 1, index & 3
