"""Core configuration, errors, solver base and report storage."""
