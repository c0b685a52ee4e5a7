"""Gauge color codes: lattices, codes, transversal gates and gauge fixing."""
