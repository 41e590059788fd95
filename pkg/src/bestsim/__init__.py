"""Single-zone building thermal simulation with a comparative test harness."""

__version__ = "0.1.0"
