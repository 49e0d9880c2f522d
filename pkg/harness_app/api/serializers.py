from rest_framework import serializers

from core.exceptions import PolynomialSyntaxError, PreconditionError, VariableIndexError
from core.serializers import StrictFieldsMixin
from measure_app.api.serializers import MeasureDescriptorSerializer
from poly_app.parser import parse
from pushforward_app.tv import BIN_RULES

from ..config import DEFAULT_DELTA_GRID, DEFAULT_EPS_GRID, SUITES, parse_grid

MEASURE_FIELDS = ('family', 'dim', 'lower', 'upper', 'rates', 'radius', 'potential')

REQUIRED_POLYNOMIALS = {
    'main-bound': ('f', 'g'),
    'fractional-bound': ('f', 'g'),
    'directional-bound': ('f', 'g'),
    'epsilon-split': ('f', 'g'),
    'sweep': ('g', 'h'),
    'moments': ('f',),
    'reverse-poincare': ('f',),
    'poincare': ('f',),
}

OWN_MEASURES = ('estimate-constant', 'all')


class FloatListField(serializers.Field):
    """A list of floats given as a number, a list or a comma-separated string."""

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [v for v in data.split(',') if v.strip()]
        elif not isinstance(data, (list, tuple)):
            data = [data]
        try:
            values = [float(v) for v in data]
        except (TypeError, ValueError):
            raise serializers.ValidationError('Expected numbers.')
        if not values:
            raise serializers.ValidationError('Expected at least one number.')
        return values

    def to_representation(self, value):
        return [float(v) for v in value]


class GridField(serializers.Field):
    """A grid in `a:b:Nlog`, `a:b:Nlin` or comma-list form, or a list of numbers."""

    def to_internal_value(self, data):
        try:
            return parse_grid(data)
        except (PreconditionError, TypeError, ValueError) as exc:
            raise serializers.ValidationError(str(exc))

    def to_representation(self, value):
        return [float(v) for v in value]


class BinsField(serializers.Field):
    """A positive bin count or the name of a bin rule."""

    def to_internal_value(self, data):
        if isinstance(data, str) and data.strip().lower() in BIN_RULES:
            return data.strip().lower()
        try:
            count = int(data)
        except (TypeError, ValueError):
            raise serializers.ValidationError(f'Expected a positive integer or one of {", ".join(BIN_RULES)}.')
        if isinstance(data, float) and data != count or count < 1:
            raise serializers.ValidationError('Expected a positive integer.')
        return count

    def to_representation(self, value):
        return value


class ExperimentConfigSerializer(StrictFieldsMixin, serializers.Serializer):
    """
    Serializer for flat experiment configurations.

    Measure fields (family, dim, lower, upper, rates, radius, potential)
    are folded into a validated measure descriptor; a single lower, upper
    or rate value is broadcast to every coordinate. Polynomial texts are
    parsed against the measure's dimension so grammar errors surface as
    validation errors. Unknown keys are rejected.
    """
    suite = serializers.ChoiceField(choices=SUITES)
    family = serializers.CharField(required=False)
    dim = serializers.IntegerField(min_value=1, required=False)
    lower = FloatListField(required=False)
    upper = FloatListField(required=False)
    rates = FloatListField(required=False)
    radius = serializers.FloatField(required=False)
    potential = serializers.CharField(required=False)
    f = serializers.CharField(required=False, trim_whitespace=True)
    g = serializers.CharField(required=False, trim_whitespace=True)
    h = serializers.CharField(required=False, trim_whitespace=True)
    e = FloatListField(required=False)
    q = serializers.FloatField(min_value=1.0, default=2.0)
    t = GridField(required=False)
    deltas = GridField(default=parse_grid(DEFAULT_DELTA_GRID))
    eps = GridField(default=parse_grid(DEFAULT_EPS_GRID))
    n = serializers.IntegerField(min_value=2, default=100_000)
    seed = serializers.IntegerField(min_value=0, default=0)
    bins = BinsField(default='auto')
    degree = serializers.IntegerField(min_value=1, default=2)
    trials = serializers.IntegerField(min_value=1, default=200)
    coefficient_scale = serializers.FloatField(min_value=0.0, default=1.0)
    output = serializers.CharField(required=False)
    svg = serializers.BooleanField(default=False)

    def validate_deltas(self, value):
        if any(v <= 0 for v in value) or any(b < a for a, b in zip(value, value[1:])):
            raise serializers.ValidationError('Deltas must be positive and sorted.')
        return value

    def validate_eps(self, value):
        if any(v <= 0 for v in value):
            raise serializers.ValidationError('Epsilons must be positive.')
        return value

    def validate_t(self, value):
        if any(v <= 0 for v in value):
            raise serializers.ValidationError('Radii must be positive.')
        return value

    def validate(self, data):
        """
        Builds the measure descriptor and checks the suite's required polynomials.
        """
        suite = data['suite']
        measure_data = {name: data.pop(name) for name in MEASURE_FIELDS if name in data}
        if suite not in OWN_MEASURES or measure_data:
            data['measure'] = self._measure_descriptor(measure_data)
        missing = [name for name in REQUIRED_POLYNOMIALS.get(suite, ()) if name not in data]
        if missing:
            raise serializers.ValidationError({name: [f'Required by suite {suite}.'] for name in missing})
        if 'measure' in data:
            dim = data['measure']['dim']
            errors = {}
            for name in ('f', 'g', 'h'):
                if name in data:
                    try:
                        parse(data[name], dim)
                    except (PolynomialSyntaxError, VariableIndexError) as exc:
                        errors[name] = [str(exc)]
            if 'e' in data and len(data['e']) != dim:
                errors['e'] = [f'Expected {dim} values.']
            if errors:
                raise serializers.ValidationError(errors)
        if 'e' in data:
            data['e'] = tuple(data['e'])
        return data

    def _measure_descriptor(self, measure_data):
        dim = measure_data.get('dim') or max(
            (len(measure_data[name]) for name in ('lower', 'upper', 'rates') if name in measure_data),
            default=1,
        )
        descriptor = {'family': measure_data.get('family', 'standard_gaussian'), 'dim': dim}
        for name in ('lower', 'upper', 'rates'):
            if name in measure_data:
                values = measure_data[name]
                descriptor[name] = values * dim if len(values) == 1 else values
        for name in ('radius', 'potential'):
            if name in measure_data:
                descriptor[name] = measure_data[name]
        serializer = MeasureDescriptorSerializer(data=descriptor)
        if not serializer.is_valid():
            raise serializers.ValidationError({'measure': serializer.errors})
        return dict(serializer.validated_data)
