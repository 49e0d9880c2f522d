from django.apps import AppConfig


class MeasureAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'measure_app'
    verbose_name = 'Log-concave measures and samplers'
