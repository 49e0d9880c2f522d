"""
Signals sent by the checkers.

`report_ready` is sent once per finished CheckReport with the keyword
argument `report`; the sender is the name of the checker function.
"""
from django.dispatch import Signal

report_ready = Signal()
