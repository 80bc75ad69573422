"""Ground-state phases of phonons in trapped-ion chains."""

__version__ = "0.1.0"
