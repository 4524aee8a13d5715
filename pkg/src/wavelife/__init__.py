"""Numerical laboratory for blow-up of semilinear wave equations by the test-function method."""
__version__ = "0.1.0"
