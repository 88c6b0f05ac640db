"""Controlled-phase gates between 87Rb atoms from excited-state hyperfine dipole-dipole interactions."""

__version__ = "0.1.0"
