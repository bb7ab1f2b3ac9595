"""Desk-scale symmetric spectra, FCPs and units of ring spectra."""

__version__ = "0.1.0"
