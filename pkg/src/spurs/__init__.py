"""Resampling of irregularly sampled spatial-frequency data onto a
Cartesian grid via a sparse consistent projection followed by a
shift-invariant correction filter, plus simulation, baseline, and
evaluation tooling."""

from .engine import (
    IterationState,
    OfflinePlan,
    ReconConfig,
    correction_filter,
    optimal_step,
    plan_offline,
    reconstruct_iterative,
    reconstruct_once,
    resample_nonuniform,
)
from .errors import FactorizationError, NumericalError, OutOfExtentError, ValidationError
from .estimators import GriddingReconstructor, SpursReconstructor
from .grid import ComplexGrid, GridSpec, ImageGrid, crop_to_fov, forward_dft, inverse_dft
from .gridding import KaiserBesselSpec, density_weights, grid_reconstruct, kb_eval
from .kernels import Footprint, KernelSpec, bspline_eval, footprint
from .metrics import mssim, snr
from .phantom import (
    Ellipse,
    Phantom,
    SampleSet,
    add_noise,
    phantom_image,
    phantom_kspace,
    shepp_logan,
)
from .solver import (
    Factorization,
    NnzReport,
    TableauSystem,
    assemble_phi,
    assemble_tableau,
    factorize,
    nnz_report,
    solve,
)
from .trajectories import (
    Trajectory,
    covering_radius,
    load_trajectory,
    radial,
    save_trajectory,
    spiral,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexGrid",
    "Ellipse",
    "Factorization",
    "FactorizationError",
    "Footprint",
    "GridSpec",
    "GriddingReconstructor",
    "ImageGrid",
    "IterationState",
    "KaiserBesselSpec",
    "KernelSpec",
    "NnzReport",
    "NumericalError",
    "OfflinePlan",
    "OutOfExtentError",
    "Phantom",
    "ReconConfig",
    "SampleSet",
    "SpursReconstructor",
    "TableauSystem",
    "Trajectory",
    "ValidationError",
    "add_noise",
    "assemble_phi",
    "assemble_tableau",
    "bspline_eval",
    "correction_filter",
    "covering_radius",
    "crop_to_fov",
    "density_weights",
    "factorize",
    "footprint",
    "forward_dft",
    "grid_reconstruct",
    "inverse_dft",
    "kb_eval",
    "load_trajectory",
    "mssim",
    "nnz_report",
    "optimal_step",
    "phantom_image",
    "phantom_kspace",
    "plan_offline",
    "radial",
    "reconstruct_iterative",
    "reconstruct_once",
    "resample_nonuniform",
    "save_trajectory",
    "shepp_logan",
    "snr",
    "solve",
    "spiral",
]
