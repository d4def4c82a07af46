"""Quantum graph symmetry toolkit.

Bi-labeled graph calculus, exact homomorphism matrices, morphism-space
linear algebra with dimensions and modular data, Haar functionals,
planar isomorphism testing and quantization presentations of discrete
groups.
"""

__version__ = "0.1.0"
