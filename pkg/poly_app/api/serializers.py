from rest_framework import serializers

from core.exceptions import PolynomialSyntaxError, VariableIndexError

from ..parser import parse


class PolynomialSerializer(serializers.Serializer):
    """
    Serializer for a polynomial in its text form.

    Reads {"dim": n, "text": "..."} and validates the text against the
    expression grammar; writes the canonical text of a Polynomial.
    """
    dim = serializers.IntegerField(min_value=1)
    text = serializers.CharField(trim_whitespace=True)

    def validate(self, data):
        """
        Parses the text so that grammar errors surface as validation errors.
        """
        try:
            data['polynomial'] = parse(data['text'], data['dim'])
        except (PolynomialSyntaxError, VariableIndexError) as exc:
            raise serializers.ValidationError({'text': str(exc)})
        return data

    def create(self, validated_data):
        return validated_data['polynomial']
