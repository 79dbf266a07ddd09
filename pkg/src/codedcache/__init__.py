"""Rate-memory tradeoff toolkit for coded caching with N <= K."""

__version__ = "0.1.0"
