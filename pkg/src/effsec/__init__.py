"""Wiretap-channel simulations under the effective-secrecy measure."""

__version__ = "0.1.0"
