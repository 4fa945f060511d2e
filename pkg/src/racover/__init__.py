"""Vector colourings of right-angled polytopes and the manifolds they cover."""

__version__ = "0.1.0"
