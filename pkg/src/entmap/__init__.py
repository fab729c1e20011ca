"""Noisy bipartite graph states, two-setting witness sampling and entanglement maps."""

__version__ = "0.1.0"
