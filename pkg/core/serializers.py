from collections.abc import Mapping

from rest_framework import serializers


class StrictFieldsMixin:
    """Rejects payload keys that are not declared serializer fields."""

    def to_internal_value(self, data):
        if isinstance(data, Mapping):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({name: ['Unknown field.'] for name in unknown})
        return super().to_internal_value(data)
