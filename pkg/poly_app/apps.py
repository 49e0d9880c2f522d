from django.apps import AppConfig


class PolyAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'poly_app'
    verbose_name = 'Sparse multivariate polynomials'
