"""Blind ptychographic phase retrieval with an rPIE baseline and a stochastic
multigrid surrogate solver (eMAGPIE), plus a synthetic experiment pipeline."""

from .field import ScanGeometry, extract_patch, scatter_patch, fft2, ifft2, hadamard, abs2, phase
from .forward import (
    Dataset,
    measure,
    revised_exit_wave,
    misfit,
    misfit_region,
    grad_z,
    grad_Q,
    add_poisson_noise,
    noise_percent,
    CalibrationError,
)
from .pie import Regularization, u_Q, u_z, object_step, probe_step, joint_combine, joint_update_region
from .surrogate import PhaseCache, SurrogateAnchor, build_anchor, surrogate_value, update_phase_cache
from .multigrid import restrict, prolong, build_weights, build_coarse_terms, magpie_object_step, emagpie_update_region
from .simulate import (
    FzpParams,
    ProbePerturbation,
    make_object,
    make_fzp_probe,
    perturb_probe,
    normalize_probe,
    make_scan_grid,
    init_object_constant,
    build_synthetic_dataset,
)
from .metrics import magnitude_error, demean_phase, remove_phase_ramp
from .runner import StopConfig, SolverConfig, SolverState, ConvergenceLog, run_solver, sweep, should_stop, noise_floor
from .container import save_dataset, load_dataset, DatasetError, CorruptDatasetError, UnsupportedVersionError

__version__ = "0.1.0"
