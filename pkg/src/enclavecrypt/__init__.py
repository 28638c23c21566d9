"""Key-nondisclosure crypto library over a simulated enclave boundary."""

__version__ = "0.1.0"
