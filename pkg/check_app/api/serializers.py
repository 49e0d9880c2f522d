from rest_framework import serializers


class CheckReportSerializer(serializers.Serializer):
    """
    JSON form of a CheckReport.

    {"name", "lhs", "rhs_core", "ratio", "stderr", "passed", "config", "details"}
    """
    name = serializers.CharField(read_only=True)
    lhs = serializers.FloatField(read_only=True)
    rhs_core = serializers.FloatField(read_only=True)
    ratio = serializers.FloatField(read_only=True)
    stderr = serializers.FloatField(read_only=True)
    passed = serializers.BooleanField(read_only=True, allow_null=True)
    config = serializers.JSONField(read_only=True)
    details = serializers.JSONField(read_only=True)


class ConstantEstimateSerializer(serializers.Serializer):
    d = serializers.IntegerField(read_only=True)
    trials = serializers.IntegerField(read_only=True)
    c_hat = serializers.FloatField(read_only=True)
    ratios = serializers.ListField(child=serializers.FloatField(), read_only=True)
    stability = serializers.ListField(child=serializers.FloatField(), read_only=True)
    last_increase = serializers.SerializerMethodField()
    config = serializers.JSONField(read_only=True)

    def get_last_increase(self, obj):
        """Growth of the running maximum over the last 100 cells."""
        return obj.last_increase(100)


class EpsilonSplitReportSerializer(serializers.Serializer):
    name = serializers.CharField(read_only=True)
    lhs = serializers.FloatField(read_only=True)
    ratio = serializers.FloatField(read_only=True)
    eps = serializers.ListField(child=serializers.FloatField(), read_only=True)
    parts = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()),
                                  read_only=True)
    split_residual = serializers.FloatField(read_only=True)
    a_profile = serializers.ListField(child=serializers.FloatField(), read_only=True)
    b_profile = serializers.ListField(child=serializers.FloatField(), read_only=True)
    eps_star = serializers.FloatField(read_only=True)
    bound_at_eps_star = serializers.FloatField(read_only=True)
    grid_minimizer = serializers.FloatField(read_only=True)
    config = serializers.JSONField(read_only=True)
