"""Exact computation of equivariant colored sl(N) link homology via matrix factorizations."""

__version__ = "0.1.0"
