from django.db import models
from django.utils.translation import gettext_lazy as _

from entanglement.grids import GridAxis
from entanglement.modes import ModeFunction, ModeLabel
from entanglement.states import DEFAULT_COEFFICIENT, EntangledBranchPair
from kernels.params import GaussianPacket, KernelParams, SlitGeometry, SlitProfile
from kernels.propagation import PropagationMethod, check_slit_setup, double_slit_modes

from ..config import Parameter, one_of
from .base import make, owned_by


class ModeSource(models.TextChoices):
    ANALYTIC = "analytic", _("Analytic Gaussian branches")
    KERNEL = "kernel", _("Branches propagated through the double slits")


PAIR_PARAMETERS = {
    "modes": Parameter(one_of(ModeSource), ModeSource.ANALYTIC),
    "x_min": Parameter(float, -24.0),
    "x_max": Parameter(float, 24.0),
    "n_points": Parameter(int, 4801),
    "x2_min": Parameter(float, -15.0),
    "x2_max": Parameter(float, 15.0),
    "n2_points": Parameter(int, 3001),
    "sigma": Parameter(float, 4.0),
    "sigma_2": Parameter(float, 1.0),
    "c1": Parameter(complex, DEFAULT_COEFFICIENT),
    "c2": Parameter(complex, DEFAULT_COEFFICIENT),
    # Analytic branches: particle 1 carries ±k0 under one envelope, particle 2 sits at ±separation/2.
    "k0": Parameter(float, 2.0),
    "separation": Parameter(float, 0.0),
    # Kernel branches: slits A/C at −slit_distance/2 and B/D at +slit_distance/2.
    "slit_distance": Parameter(float, 6.0),
    "b": Parameter(float, 0.3),
    "profile": Parameter(one_of(SlitProfile), SlitProfile.GAUSSIAN),
    "t_c": Parameter(float, 0.001),
    "t_f": Parameter(float, 5.001),
    "method": Parameter(one_of(PropagationMethod), PropagationMethod.SPECTRAL),
}


def _analytic_modes(values: dict, axis_1: GridAxis, axis_2: GridAxis) -> dict[str, ModeFunction]:
    with owned_by("ModeFunction"):
        return {
            "mode_1a": ModeFunction.gaussian(axis_1, sigma=values["sigma"], wavenumber=values["k0"], label=ModeLabel.MODE_1A),
            "mode_1b": ModeFunction.gaussian(axis_1, sigma=values["sigma"], wavenumber=-values["k0"], label=ModeLabel.MODE_1B),
            "mode_2c": ModeFunction.gaussian(axis_2, center=values["separation"] / 2, sigma=values["sigma_2"], label=ModeLabel.MODE_2C),
            "mode_2d": ModeFunction.gaussian(axis_2, center=-values["separation"] / 2, sigma=values["sigma_2"], label=ModeLabel.MODE_2D),
        }


def _kernel_modes(values: dict, axis_1: GridAxis, axis_2: GridAxis) -> dict[str, ModeFunction]:
    params = make(KernelParams, t_c=values["t_c"], t_f=values["t_f"])
    half = values["slit_distance"] / 2

    left = make(SlitGeometry, b=values["b"], profile=values["profile"], center=-half)
    right = make(SlitGeometry, b=values["b"], profile=values["profile"], center=half)

    modes = {}

    for axis, sigma, labels in [(axis_1, values["sigma"], (ModeLabel.MODE_1A, ModeLabel.MODE_1B)), (axis_2, values["sigma_2"], (ModeLabel.MODE_2C, ModeLabel.MODE_2D))]:
        packet = make(GaussianPacket, sigma=sigma)

        with owned_by("GridAxis"):
            check_slit_setup(packet, axis, params, values["method"])

        with owned_by("DoubleSlitModes"):
            pair = double_slit_modes(packet, axis, params, left, right, values["method"], labels)

        for mode in [pair.mode_a, pair.mode_b]:
            modes["mode_{}".format(mode.label.lower())] = mode

    return modes


def build_pair(values: dict) -> EntangledBranchPair:
    """
    The entangled pair ``c1·ψ₁A·ψ₂D + c2·ψ₁B·ψ₂C`` described by the pair parameters.

    With ``modes = kernel`` each particle is propagated through its double slit, slit C
    in front of slit A and slit D in front of slit B.
    """

    axis_1 = make(GridAxis, x_min=values["x_min"], x_max=values["x_max"], n_points=values["n_points"])
    axis_2 = make(GridAxis, x_min=values["x2_min"], x_max=values["x2_max"], n_points=values["n2_points"])

    if values["modes"] == ModeSource.KERNEL:
        modes = _kernel_modes(values, axis_1, axis_2)
    else:
        modes = _analytic_modes(values, axis_1, axis_2)

    return make(EntangledBranchPair, c1=values["c1"], c2=values["c2"], **modes)
