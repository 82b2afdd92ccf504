"""Unitary t-designs: frame potentials, Clifford/Weyl constructions, MUB-based designs."""
__version__ = "0.1.0"
