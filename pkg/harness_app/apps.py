from django.apps import AppConfig


class HarnessAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'harness_app'
    verbose_name = 'Experiment harness'

    def ready(self):
        from . import signals
