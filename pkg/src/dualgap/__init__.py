"""dualgap - first-order methods with per-iteration duality gap certificates."""
__version__ = "0.1.0"
