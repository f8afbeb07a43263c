"""quatlift: quaternion-order powersmooth lifting, Borel HSP solving, and a
quaternion-side isogeny key-recovery simulator."""

__version__ = "0.1.0"
