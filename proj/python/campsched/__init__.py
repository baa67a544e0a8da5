"""Campus activity scheduling and battery dispatch."""

from ._campsched import *  # noqa: F401,F403
