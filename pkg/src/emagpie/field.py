"""Complex-grid primitives: patch extraction, unitary 2-D FFTs, elementwise helpers.

All fields are 2-D numpy arrays (complex128 for wavefields, float64 for
intensities), stored row-major. Scan positions are top-left corners of
square probe-sized windows that must lie fully inside the object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScanGeometry:
    """Square-patch scan layout: probe side, object side, and window corners."""

    probe_side: int
    object_side: int
    offsets: np.ndarray  # (N, 2) integer (row, col) top-left corners

    def __post_init__(self):
        offsets = np.atleast_2d(np.asarray(self.offsets, dtype=np.intp))
        object.__setattr__(self, "offsets", offsets)
        m, n = self.probe_side, self.object_side
        if m < 1:
            raise ValueError(f"probe side must be positive, got {m}")
        if n < m:
            raise ValueError(f"object side {n} smaller than probe side {m}")
        if offsets.ndim != 2 or offsets.shape[1] != 2 or offsets.shape[0] < 1:
            raise ValueError("offsets must be a nonempty (N, 2) array")
        if offsets.min() < 0 or offsets.max() > n - m:
            raise ValueError("scan offsets must keep every patch inside the object")
        if len(np.unique(offsets, axis=0)) != len(offsets):
            raise ValueError("scan offsets must be unique")

    def __len__(self) -> int:
        return len(self.offsets)


def extract_patch(obj: np.ndarray, geom: ScanGeometry, k: int) -> np.ndarray:
    """Copy out the k-th probe-sized window of the object."""
    obj = np.asarray(obj)
    n, m = geom.object_side, geom.probe_side
    if obj.shape != (n, n):
        raise ValueError(f"object shape {obj.shape} does not match geometry {(n, n)}")
    if not 0 <= k < len(geom):
        raise IndexError(f"scan index {k} out of range [0, {len(geom)})")
    r, c = geom.offsets[k]
    return obj[r:r + m, c:c + m].copy()


def scatter_patch(obj: np.ndarray, patch: np.ndarray, geom: ScanGeometry, k: int) -> np.ndarray:
    """Return a copy of the object with the k-th window overwritten by `patch`."""
    obj = np.asarray(obj)
    patch = np.asarray(patch)
    n, m = geom.object_side, geom.probe_side
    if obj.shape != (n, n):
        raise ValueError(f"object shape {obj.shape} does not match geometry {(n, n)}")
    if patch.shape != (m, m):
        raise ValueError(f"patch shape {patch.shape} must be {(m, m)}")
    if not 0 <= k < len(geom):
        raise IndexError(f"scan index {k} out of range [0, {len(geom)})")
    out = obj.copy()
    r, c = geom.offsets[k]
    out[r:r + m, c:c + m] = patch
    return out


def _require_square(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square 2-D field, got shape {x.shape}")
    return x


def fft2(x: np.ndarray) -> np.ndarray:
    """Unitary 2-D DFT (1/side scaling per direction)."""
    return np.fft.fft2(_require_square(x), norm="ortho")


def ifft2(y: np.ndarray) -> np.ndarray:
    """Unitary 2-D inverse DFT; exact inverse of :func:`fft2` up to round-off."""
    return np.fft.ifft2(_require_square(y), norm="ortho")


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product of two same-shape fields."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b


def abs2(a: np.ndarray) -> np.ndarray:
    """Elementwise squared magnitude, returned as a real field."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return a.real * a.real + a.imag * a.imag
    return a * a


def phase(a: np.ndarray) -> np.ndarray:
    """Elementwise principal argument in (-pi, pi], with phase(0) = 0."""
    a = np.asarray(a)
    p = np.angle(a)
    return np.where(a == 0, 0.0, p)
