"""Gap-opening paper detection in temporal concept co-occurrence networks."""

__version__ = "0.1.0"
