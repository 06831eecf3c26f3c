"""Reliability analysis of multi-hop routing in layered relay networks."""

try:
    from ._relaynet import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _relaynet import *  # noqa: F401,F403  (in-tree build layout)
