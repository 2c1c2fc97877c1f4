"""Fractal conservation law solvers."""
