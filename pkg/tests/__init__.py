"""
Test package for alsim.
"""