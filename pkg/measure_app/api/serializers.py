from rest_framework import serializers

from core.exceptions import MeasureConfigurationError
from core.serializers import StrictFieldsMixin

from ..measures import POTENTIALS, from_descriptor

FAMILIES = ('standard_gaussian', 'product_exponential', 'uniform_box', 'uniform_ball',
            'general_potential')

FAMILY_ALIASES = {
    'gaussian': 'standard_gaussian',
    'laplace': 'product_exponential',
    'exponential': 'product_exponential',
    'box': 'uniform_box',
    'uniform': 'uniform_box',
    'ball': 'uniform_ball',
    'potential': 'general_potential',
}

REQUIRED_PARAMETERS = {
    'standard_gaussian': (),
    'product_exponential': ('rates',),
    'uniform_box': ('lower', 'upper'),
    'uniform_ball': (),
    'general_potential': ('potential', 'radius'),
}


class MeasureDescriptorSerializer(StrictFieldsMixin, serializers.Serializer):
    """
    Serializer for measure descriptors.

    Accepts the descriptor JSON {"family": ..., "dim": n, parameters...}
    (hyphenated family names and short aliases such as "gaussian" are
    normalized) and builds the measure on save. Serializing a measure
    returns its canonical descriptor.
    """
    family = serializers.CharField()
    dim = serializers.IntegerField(min_value=1)
    rates = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)
    lower = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)
    upper = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)
    radius = serializers.FloatField(required=False)
    potential = serializers.ChoiceField(choices=sorted(POTENTIALS), required=False)

    def validate_family(self, value):
        family = value.strip().lower().replace('-', '_')
        family = FAMILY_ALIASES.get(family, family)
        if family not in FAMILIES:
            raise serializers.ValidationError(f"Unknown measure family '{value}'.")
        return family

    def validate(self, data):
        """
        Checks family-specific parameters and that they fit dim.
        """
        family, dim = data['family'], data['dim']
        missing = [name for name in REQUIRED_PARAMETERS[family] if name not in data]
        if missing:
            raise serializers.ValidationError({name: ['This field is required.'] for name in missing})
        for name in ('rates', 'lower', 'upper'):
            if name in data and len(data[name]) != dim:
                raise serializers.ValidationError({name: [f'Expected {dim} values.']})
        if family == 'uniform_box' and any(a >= b for a, b in zip(data['lower'], data['upper'])):
            raise serializers.ValidationError({'upper': ['Every upper bound must exceed its lower bound.']})
        return data

    def create(self, validated_data):
        try:
            return from_descriptor(validated_data)
        except MeasureConfigurationError as exc:
            raise serializers.ValidationError({'family': [str(exc)]}) from exc

    def to_representation(self, instance):
        return instance.descriptor()
