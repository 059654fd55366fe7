"""Exact workbench for extended affine Weyl groups, their Hecke algebras in
the canonical basis, the asymptotic based ring, and torus-equivariant
K-theory of the registered example geometries by fixed-point localization."""

__version__ = "0.1.0"
