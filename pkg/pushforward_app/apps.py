from django.apps import AppConfig


class PushforwardAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'pushforward_app'
    verbose_name = 'Pushforward distributions and TV estimation'
