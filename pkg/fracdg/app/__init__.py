"""Solver application package."""
