"""Fundamental-limit formulas for MIMO massive multiple access channels."""

__version__ = "0.1.0"
