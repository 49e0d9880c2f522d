from rest_framework import serializers


class TVEstimateSerializer(serializers.Serializer):
    """
    Serializer for TVEstimate objects: {"tv": v, "bins": B, "stderr": s}.
    """
    tv = serializers.FloatField(source='value', min_value=0.0, max_value=1.0)
    bins = serializers.IntegerField(min_value=1)
    stderr = serializers.FloatField(source='bootstrap_stderr', min_value=0.0)


class SweepRowSerializer(serializers.Serializer):
    """One CSV row of a shift sweep: delta, tv, stderr, bins."""
    delta = serializers.FloatField()
    tv = serializers.FloatField(source='estimate.value')
    stderr = serializers.FloatField(source='estimate.bootstrap_stderr')
    bins = serializers.IntegerField(source='estimate.bins')
