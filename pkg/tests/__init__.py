"""
irs-lab Test Suite

This package contains all tests for the irs-lab experiments and library.
"""

__version__ = "1.0.0"
