from scsopt.ct.imageio import (
    read_image_csv,
    read_pgm,
    read_sinogram_csv,
    write_image_csv,
    write_pgm,
    write_sinogram_csv,
)
from scsopt.ct.metrics import psnr, ssim
from scsopt.ct.phantoms import grains_analog, make_phantom, shepp_logan, threephases_analog
from scsopt.ct.problem import (
    CtObjective,
    CtProblem,
    ScenarioSpec,
    add_gaussian_noise,
    build_scenario,
    ct_objective,
)
from scsopt.ct.projector import Geometry, back_project, default_detector_count, forward_project
from scsopt.ct.tv import tv_subgradient, tv_value

__all__ = [
    "CtObjective",
    "CtProblem",
    "Geometry",
    "ScenarioSpec",
    "add_gaussian_noise",
    "back_project",
    "build_scenario",
    "ct_objective",
    "default_detector_count",
    "forward_project",
    "grains_analog",
    "make_phantom",
    "psnr",
    "read_image_csv",
    "read_pgm",
    "read_sinogram_csv",
    "shepp_logan",
    "ssim",
    "threephases_analog",
    "tv_subgradient",
    "tv_value",
    "write_image_csv",
    "write_pgm",
    "write_sinogram_csv",
]
