"""Cost-aware task allocation and planning for mixed human/robot work cells."""

__version__ = "0.1.0"
