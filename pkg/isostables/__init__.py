"""Isostables and isochrons of hyperbolic fixed points from Laplace averages."""
