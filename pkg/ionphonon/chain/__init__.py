"""Trap geometry and Bose-Hubbard model assembly."""
