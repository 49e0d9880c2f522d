from django.apps import AppConfig


class CheckAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'check_app'
    verbose_name = 'Inequality checkers and constant calibration'
