"""Rewriting engine for planar diagrams of Coxeter and dihedral braid groups."""
__version__ = "0.1.0"
