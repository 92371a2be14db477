"""Q8-symmetric hyperelliptic Jacobians: exact and numerical verification toolkit."""

__version__ = "0.1.0"
