"""Exact computation of divisor class groups, factoriality and element
factorizations in finite Laurent intersection rings, specialized to cluster
algebras covered by the Banff recursion.

All arithmetic is exact (arbitrary-precision integers and rationals); the
computational core is multivariate polynomial factorization over Q.
"""

__version__ = "0.1.0"
