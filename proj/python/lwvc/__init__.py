"""Scalable wavelet video codec with motion-compensated temporal filtering."""

from ._core import (
    Error,
    Video,
    bd_rate,
    decode,
    drop_layers,
    dump_units,
    encode,
    interpolate_lambda,
    layer_scale_qp,
    ms_ssim,
    psnr,
)

__all__ = [
    "Error",
    "Video",
    "bd_rate",
    "decode",
    "drop_layers",
    "dump_units",
    "encode",
    "interpolate_lambda",
    "layer_scale_qp",
    "ms_ssim",
    "psnr",
]
