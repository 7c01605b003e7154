from django.apps import AppConfig


class QubitsConfig(AppConfig):
    name = "qubits"
    verbose_name = "Two-level signaling toy model"
