"""Spent-fuel characterization toolkit.

Core pieces: a deterministic reduced-order depletion model (`oracle`), dataset
generation and normalization (`dataset`), a from-scratch MLP surrogate
(`mlp`), seeded hyperparameter search (`tuner`), Monte-Carlo UQ and Sobol'
sensitivity analysis (`analysis`), timing/speedup/C-vs-E harnesses (`bench`),
a FastAPI service (`service`), and a thin CLI client (`cli`).
"""

__version__ = "0.1.0"

from .history import AssemblyInput, build_history, reference_history, reference_input
from .oracle import COOLING_TIMES_Y, SnfOutput, output_labels, simulate

__all__ = [
    "__version__",
    "AssemblyInput",
    "build_history",
    "reference_history",
    "reference_input",
    "COOLING_TIMES_Y",
    "SnfOutput",
    "output_labels",
    "simulate",
]
