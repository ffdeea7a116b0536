from django.apps import AppConfig


class DiscrepancyConfig(AppConfig):
    name = "discrepancy"
