from django.db import models
from django.utils.translation import gettext_lazy as _


class Scenario(models.TextChoices):
    PATTERN = "pattern", _("Detection pattern")
    PHASE_SWEEP = "phase-sweep", _("Fringe phase sweep")
    SLIT_DEFECT = "slit-defect", _("Slit unitarity defect")
    QUBIT = "qubit", _("Qubit marginals")
    TIMING = "timing", _("Signaling timing")
    READOUT = "readout", _("Phase readout budget")


class ScenarioRun(models.Model):
    """
    A completed scenario run. The manifest written next to the artifacts stays authoritative.

    :ivar scenario: Which scenario ran.
    :type scenario: Str
    :ivar seed: The seed in force, a 64-bit unsigned integer.
    :type seed: Decimal.Decimal
    :ivar config: The scenario parameters as read from the file.
    :type config: Dict
    :ivar artifacts: File names written into the output directory.
    :type artifacts: List[str]
    :ivar output_dir: Where the artifacts were written.
    :type output_dir: Str
    :ivar version: Version of the lab that produced the run.
    :type version: Str
    :ivar duration: Wall-clock seconds spent on the run.
    :type duration: Float
    :ivar created: Timestamp when the run was recorded.
    :type created: datetime.datetime
    """

    scenario = models.CharField(_("scenario"), choices=Scenario.choices, max_length=20)
    seed = models.DecimalField(_("seed"), max_digits=20, decimal_places=0)
    config = models.JSONField(_("config"), default=dict)
    artifacts = models.JSONField(_("artifacts"), default=list)
    output_dir = models.CharField(_("output directory"), max_length=1024)
    version = models.CharField(_("version"), max_length=50)
    duration = models.FloatField(_("duration"))

    created = models.DateTimeField(_("created"), auto_now_add=True)

    class Meta:
        verbose_name = _("scenario run")
        verbose_name_plural = _("scenario runs")
        ordering = ["-created"]
        get_latest_by = "created"
        constraints = [models.CheckConstraint(condition=models.Q(duration__gte=0), name="nonnegative_duration")]

    def __str__(self):
        return f"{self.scenario} (seed {self.seed}) @ {self.created}"
