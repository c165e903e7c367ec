"""
Test suite for dkit.
"""
