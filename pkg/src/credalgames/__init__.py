"""credalgames: exact analysis of extensive-form games with maxmin players.

Builds credal sets over opponent behavior, updates them by full Bayesian
conditioning, constructs rectangular hulls, solves ex-ante and conditional
maxmin problems, and decides dynamic consistency, all in exact rational
arithmetic.
"""

__version__ = "0.1.0"
