"""Two-level multigrid Poisson solver with learned prolongation operators."""

from ._mgsr import (
    ConfigError,
    Error,
    InputError,
    ShapeError,
    fft_poisson_solve,
    fit_linear_stencil,
    gauss_seidel,
    laplacian,
    power_spectrum,
    read_pgrd,
    residual,
    restrict,
    solve,
    spline_prolong,
    symlog_denormalize,
    symlog_normalize,
    write_pgrd,
)

__all__ = [
    "ConfigError",
    "Error",
    "InputError",
    "ShapeError",
    "fft_poisson_solve",
    "fit_linear_stencil",
    "gauss_seidel",
    "laplacian",
    "power_spectrum",
    "read_pgrd",
    "residual",
    "restrict",
    "solve",
    "spline_prolong",
    "symlog_denormalize",
    "symlog_normalize",
    "write_pgrd",
]
