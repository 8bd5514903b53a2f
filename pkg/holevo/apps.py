from django.apps import AppConfig


class HolevoConfig(AppConfig):
    name = "holevo"
    verbose_name = "Classical-quantum channel coding toolkit"
