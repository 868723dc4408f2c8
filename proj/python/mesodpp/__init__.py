"""Determinantal point processes of unitary-invariant ensembles.

Thin python package around the _mesodpp pybind11 core: correlation kernels,
exact samplers, cumulant machinery and mesoscopic CLT experiments.
"""
from _mesodpp import *  # noqa: F401,F403
from _mesodpp import __version__  # noqa: F401
