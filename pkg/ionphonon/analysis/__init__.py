"""Observables and fits built on solver measurements."""
