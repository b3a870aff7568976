"""One-dimensional variational theories: evaluation, classification, solving."""

__version__ = "0.1.0"
