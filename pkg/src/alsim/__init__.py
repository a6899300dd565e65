"""
alsim package: pool-based active-learning simulation.
"""

__version__ = "0.1.0"
