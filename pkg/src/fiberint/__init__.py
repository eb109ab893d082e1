"""Fiber integration on simplicial bundles and Deligne cohomology transfers."""
