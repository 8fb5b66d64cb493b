"""Four-node motif analysis of temporal origin-destination mobility networks."""

__version__ = "0.1.0"
