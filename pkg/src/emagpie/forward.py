"""Forward measurement model, revised exit waves, misfit and its complex
gradients, and calibrated Poisson noise generation.

The measurement of scan region k is the far-field intensity of the exit wave
Q * z_k, with the unitary FFT convention of :mod:`emagpie.field`:

    d_k = |fft2(Q * z_k)|^2

The revised exit wave replaces the Fourier modulus of the current exit wave
by sqrt(d_k) and keeps its phases. Where the Fourier coefficient is exactly
zero the phase is taken from an optional per-region cache (zero on a cold
cache), which is the memory rule the surrogate solver relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import ScanGeometry, abs2, extract_patch, fft2, hadamard, ifft2


@dataclass
class Dataset:
    """Diffraction intensities plus geometry; synthetic runs carry the truth.

    Attributes
    ----------
    geometry : ScanGeometry
        Scan layout shared by all frames.
    intensities : ndarray, shape (N, m, m)
        Measured (possibly noisy) detector counts, nonnegative.
    clean_intensities : ndarray or None
        Noiseless counts for synthetic data, same shape as `intensities`.
    truth_object, truth_probe : ndarray or None
        Ground-truth complex fields for synthetic data.
    noise_percent : float or None
        Achieved amplitude-noise percentage of `intensities` vs the clean data.
    """

    geometry: ScanGeometry
    intensities: np.ndarray
    clean_intensities: np.ndarray | None = None
    truth_object: np.ndarray | None = None
    truth_probe: np.ndarray | None = None
    noise_percent: float | None = None

    def __post_init__(self):
        m = self.geometry.probe_side
        d = np.asarray(self.intensities, dtype=np.float64)
        if d.shape != (len(self.geometry), m, m):
            raise ValueError(
                f"intensities shape {d.shape} does not match geometry "
                f"({len(self.geometry)}, {m}, {m})"
            )
        if d.min() < 0:
            raise ValueError("intensities must be nonnegative")
        self.intensities = d
        if self.clean_intensities is not None:
            c = np.asarray(self.clean_intensities, dtype=np.float64)
            if c.shape != d.shape:
                raise ValueError("clean_intensities shape must match intensities")
            self.clean_intensities = c


def measure(Q: np.ndarray, z: np.ndarray, geom: ScanGeometry) -> np.ndarray:
    """Noiseless intensities |fft2(Q * P_k z)|^2 for every scan region."""
    Q = np.asarray(Q)
    m = geom.probe_side
    if Q.shape != (m, m):
        raise ValueError(f"probe shape {Q.shape} must be {(m, m)}")
    out = np.empty((len(geom), m, m))
    for k in range(len(geom)):
        out[k] = abs2(fft2(hadamard(Q, extract_patch(z, geom, k))))
    return out


def revised_exit_wave(
    Q: np.ndarray,
    z_k: np.ndarray,
    d_k: np.ndarray,
    phase_cache: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Modulus-projected exit wave and the Fourier phase field it used.

    Replaces the Fourier modulus of Q * z_k by sqrt(d_k) while keeping the
    phases. At indices where fft2(Q * z_k) is exactly zero the phase comes
    from `phase_cache` when supplied, else 0. The returned phase field is
    what a per-region cache should store for the next visit.
    """
    Q, z_k, d_k = np.asarray(Q), np.asarray(z_k), np.asarray(d_k)
    if not (Q.shape == z_k.shape == d_k.shape):
        raise ValueError(f"shape mismatch: {Q.shape}, {z_k.shape}, {d_k.shape}")
    if d_k.min() < 0:
        raise ValueError("intensities must be nonnegative")
    F = fft2(Q * z_k)
    theta = np.angle(F)
    zero = F == 0
    if zero.any():
        fallback = np.zeros_like(theta) if phase_cache is None else np.asarray(phase_cache)
        theta = np.where(zero, fallback, theta)
    R = ifft2(np.sqrt(d_k) * np.exp(1j * theta))
    return R, theta


def misfit_region(
    Q: np.ndarray,
    z_k: np.ndarray,
    d_k: np.ndarray,
    phase_cache: np.ndarray | None = None,
) -> float:
    """Single-region exit-wave misfit 0.5 * ||Q*z_k - R_k||_2^2."""
    R, _ = revised_exit_wave(Q, z_k, d_k, phase_cache)
    return 0.5 * float(abs2(Q * z_k - R).sum())


def misfit(Q: np.ndarray, z: np.ndarray, dataset: Dataset) -> float:
    """Total exit-wave misfit, summed over all scan regions."""
    geom = dataset.geometry
    total = 0.0
    for k in range(len(geom)):
        total += misfit_region(Q, extract_patch(z, geom, k), dataset.intensities[k])
    return total


def grad_z(Q: np.ndarray, z_k: np.ndarray, d_k: np.ndarray) -> np.ndarray:
    """Complex gradient of the region misfit in the object patch.

    Uses the real/imaginary identification (grad = grad_x + i*grad_y), with
    the revised exit wave held at the current point.
    """
    R, _ = revised_exit_wave(Q, z_k, d_k)
    return np.conj(Q) * (Q * z_k - R)


def grad_Q(Q: np.ndarray, z_k: np.ndarray, d_k: np.ndarray) -> np.ndarray:
    """Complex gradient of the region misfit in the probe."""
    R, _ = revised_exit_wave(Q, z_k, d_k)
    return np.conj(z_k) * (Q * z_k - R)


def noise_percent(noisy: np.ndarray, clean: np.ndarray) -> float:
    """Amplitude-noise percentage 100 * sqrt(sum||d - d~||^2 / sum||d~||^2)."""
    noisy, clean = np.asarray(noisy, dtype=float), np.asarray(clean, dtype=float)
    if noisy.shape != clean.shape:
        raise ValueError(f"shape mismatch: {noisy.shape} vs {clean.shape}")
    denom = float((clean * clean).sum())
    if denom == 0.0:
        raise ValueError("noise percentage undefined for all-zero clean data")
    num = float(((noisy - clean) ** 2).sum())
    return 100.0 * np.sqrt(num / denom)


class CalibrationError(RuntimeError):
    """Raised when a requested noise level cannot be calibrated."""


def add_poisson_noise(
    clean: np.ndarray,
    target_percent: float,
    seed: int,
    probes: int = 10,
) -> tuple[np.ndarray, float]:
    """Poisson-sample the clean intensities at a flux calibrated to the target.

    The flux scale s (counts per intensity unit) is found by bisection on
    log s, estimating the expected amplitude-noise percentage of
    Poisson(s*d)/s with `probes` Monte-Carlo draws per level. The returned
    noisy stack is a fresh draw at the calibrated flux whose achieved
    percentage is within 5% relative of the target; all sampling is driven
    by one seeded generator, so results are reproducible bit for bit.
    """
    clean = np.asarray(clean, dtype=np.float64)
    if target_percent <= 0:
        raise ValueError("target noise percentage must be positive")
    if clean.min() < 0:
        raise ValueError("clean intensities must be nonnegative")
    total_sq = float((clean * clean).sum())
    total = float(clean.sum())
    if total_sq == 0.0 or total == 0.0:
        raise CalibrationError("cannot calibrate noise on all-zero intensities")

    rng = np.random.default_rng(seed)

    def draw(s: float) -> np.ndarray:
        return rng.poisson(s * clean).astype(np.float64) / s

    def probe_level(s: float) -> float:
        return float(np.mean([noise_percent(draw(s), clean) for _ in range(probes)]))

    # Poisson variance of d = Poisson(s*d~)/s is d~/s per pixel, so the
    # expected percentage is ~ 100*sqrt(total / (s*total_sq)).
    s = total / ((target_percent / 100.0) ** 2 * total_sq)
    lo, hi = s / 16.0, s * 16.0
    for _ in range(8):
        if probe_level(lo) >= target_percent:
            break
        lo /= 16.0
    else:
        raise CalibrationError(f"target {target_percent}% unreachable (too noisy even at low flux)")
    for _ in range(8):
        if probe_level(hi) <= target_percent:
            break
        hi *= 16.0
    else:
        raise CalibrationError(f"target {target_percent}% unreachable (noise floor above target)")

    for _ in range(20):
        mid = float(np.sqrt(lo * hi))
        level = probe_level(mid)
        if abs(level - target_percent) <= 0.01 * target_percent:
            s = mid
            break
        if level > target_percent:
            lo = mid
        else:
            hi = mid
        s = mid

    for _ in range(8):
        noisy = draw(s)
        achieved = noise_percent(noisy, clean)
        if abs(achieved - target_percent) <= 0.045 * target_percent:
            return noisy, achieved
        s *= (achieved / target_percent) ** 2
    raise CalibrationError(
        f"calibration did not settle near {target_percent}% (last draw {achieved:.3f}%)"
    )
