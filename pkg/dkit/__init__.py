"""
dkit: causality analysis of Lorentzian distance functions.
"""

__version__ = "0.1.0"
