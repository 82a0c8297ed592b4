"""metrika: metric-preserving functions, contraction hypotheses and fixed-point sets."""

__version__ = "0.1.0"
