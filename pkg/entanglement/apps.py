from django.apps import AppConfig


class EntanglementConfig(AppConfig):
    name = "entanglement"
    verbose_name = "Entangled two-particle states"
