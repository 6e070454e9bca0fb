"""Lifespan regions and blow-up experiments for coupled semilinear wave systems
with scale-invariant damping and mass on a power-law expanding background."""

__version__ = "0.1.0"
