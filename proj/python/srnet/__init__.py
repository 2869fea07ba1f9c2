"""Super-resolution and land-cover classification for multispectral rasters.

Images are 2-D float arrays with intensities in [0, 1].
"""

from ._core import (
    SrcnnModel,
    SrnetError,
    cli,
    downsample_block_mean,
    keys_kernel,
    mse,
    psnr,
    run_experiment,
    solve_bicubic_patch,
    synthetic_scene,
    train_srcnn,
    upscale,
)

__all__ = [
    "SrcnnModel",
    "SrnetError",
    "cli",
    "downsample_block_mean",
    "keys_kernel",
    "mse",
    "psnr",
    "run_experiment",
    "solve_bicubic_patch",
    "synthetic_scene",
    "train_srcnn",
    "upscale",
]
