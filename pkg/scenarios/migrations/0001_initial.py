# Generated by Django 5.2.4 on 2026-10-17 09:00

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ScenarioRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "scenario",
                    models.CharField(
                        choices=[
                            ("pattern", "Detection pattern"),
                            ("phase-sweep", "Fringe phase sweep"),
                            ("slit-defect", "Slit unitarity defect"),
                            ("qubit", "Qubit marginals"),
                            ("timing", "Signaling timing"),
                            ("readout", "Phase readout budget"),
                        ],
                        max_length=20,
                        verbose_name="scenario",
                    ),
                ),
                ("seed", models.DecimalField(decimal_places=0, max_digits=20, verbose_name="seed")),
                ("config", models.JSONField(default=dict, verbose_name="config")),
                ("artifacts", models.JSONField(default=list, verbose_name="artifacts")),
                ("output_dir", models.CharField(max_length=1024, verbose_name="output directory")),
                ("version", models.CharField(max_length=50, verbose_name="version")),
                ("duration", models.FloatField(verbose_name="duration")),
                ("created", models.DateTimeField(auto_now_add=True, verbose_name="created")),
            ],
            options={
                "verbose_name": "scenario run",
                "verbose_name_plural": "scenario runs",
                "ordering": ["-created"],
                "get_latest_by": "created",
                "constraints": [models.CheckConstraint(condition=models.Q(("duration__gte", 0)), name="nonnegative_duration")],
            },
        ),
    ]
