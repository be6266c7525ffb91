"""Finite presheaf topos computation engine.

Builds presheaf toposes over small finite base categories and
machine-checks constructions around decidability: the decidable-quotient
reflection, connectedness, pneumoconnected fibers via stage-wise
forcing, the NS/DQO/DSO axioms, and precohesion of the topos over its
subcategory of decidable objects.
"""

__version__ = "0.1.0"
