"""Exact diagonalization in a fixed phonon-number sector."""
