"""Desk-scale verification that non-CM elliptic curves over Q with a rational
isogeny have surjective mod-p Galois image for 37 < p <= p_max."""

__version__ = "0.1.0"
