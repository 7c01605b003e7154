import pandas as pd
from django.db import models
from django.utils.translation import gettext_lazy as _
from scipy import constants

from entanglement.grids import GridAxis
from kernels.params import GaussianPacket, KernelParams, SlitGeometry, SlitProfile
from kernels.propagation import PropagationMethod, check_slit_setup, propagate_slit, unitarity_defect
from kernels.units import NaturalUnits

from ..config import Parameter, floats, one_of
from ..models import Scenario
from .base import BaseRunner, make, owned_by


class UnitSystem(models.TextChoices):
    NATURAL = "natural", _("Natural units (ħ = m = 1)")
    SI = "si", _("SI units")


class SlitDefectRunner(BaseRunner):
    """
    Probability lost at a single slit, one row per half-width ``b``.

    With ``units = si`` lengths are in metres, times in seconds and the wavenumber in
    inverse metres; they are converted to natural units with ``length_scale`` and
    ``particle_mass`` before propagating, and ``b`` is reported as given.
    """

    name = "Slit unitarity defect"
    scenario = Scenario.SLIT_DEFECT
    parameters = {
        "units": Parameter(one_of(UnitSystem), UnitSystem.NATURAL),
        "length_scale": Parameter(float, 1e-6),
        "particle_mass": Parameter(float, constants.m_e),
        "mass": Parameter(float, 1.0),
        "hbar": Parameter(float, 1.0),
        "x_min": Parameter(float, -20.0),
        "x_max": Parameter(float, 20.0),
        "n_points": Parameter(int, 16385),
        "sigma": Parameter(float, 1.0),
        "center": Parameter(float, 0.0),
        "k0": Parameter(float, 0.0),
        "t_c": Parameter(float, 1.0),
        "t_f": Parameter(float, 2.0),
        "b": Parameter(floats, [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]),
        "slit_center": Parameter(float, 0.0),
        "profile": Parameter(one_of(SlitProfile), SlitProfile.HARD),
        "method": Parameter(one_of(PropagationMethod), PropagationMethod.SPECTRAL),
    }

    def _natural(self, values: dict) -> dict:
        if values["units"] != UnitSystem.SI:
            return values

        units = make(NaturalUnits, length_scale=values["length_scale"], mass=values["particle_mass"])
        converted = dict(values, mass=1.0, hbar=1.0, k0=units.wavenumber(values["k0"]), b=[units.length(b) for b in values["b"]])

        for name in ["x_min", "x_max", "sigma", "center", "slit_center"]:
            converted[name] = units.length(values[name])

        for name in ["t_c", "t_f"]:
            converted[name] = units.time(values[name])

        return converted

    def prepare(self, values: dict) -> dict:
        natural = self._natural(values)

        axis = make(GridAxis, x_min=natural["x_min"], x_max=natural["x_max"], n_points=natural["n_points"])
        params = make(KernelParams, mass=natural["mass"], hbar=natural["hbar"], t_c=natural["t_c"], t_f=natural["t_f"])
        packet = make(GaussianPacket, center=natural["center"], sigma=natural["sigma"], wavenumber=natural["k0"])
        slits = [make(SlitGeometry, b=b, profile=natural["profile"], center=natural["slit_center"]) for b in natural["b"]]

        with owned_by("GridAxis"):
            check_slit_setup(packet, axis, params, natural["method"])

        return {"axis": axis, "params": params, "packet": packet, "slits": list(zip(values["b"], slits)), "method": natural["method"]}

    def execute(self, prepared: dict) -> dict:
        rows = []

        for b, slit in prepared["slits"]:
            result = propagate_slit(prepared["packet"], prepared["axis"], prepared["params"], slit, prepared["method"])
            rows.append([b, result.transmitted, result.output_norm2, unitarity_defect(result)])

        return {"slit_defect.csv": pd.DataFrame(rows, columns=["b", "transmitted", "output_norm2", "defect"])}
