"""Nonassociative quantum mechanics on finite-dimensional unital *-algebras."""
