"""Sharp Bohr-type radii for K-quasiconformal harmonic mappings.

Modules
-------
coeffseq     coefficient sequences, certified truncated sums, bounded values
mappings     harmonic mappings, extremal families, random admissible samples
radii        catalog of radius equations and a bracketed root finder
functionals  inequality left-hand sides and Holds/Violated/Inconclusive verdicts
verify       seeded theorem sweeps, sharpness scans and lemma suites
cli          the ``qcbohr`` command
"""

from .coeffseq import BoundedValue, CoefficientSequence, TailBound
from .functionals import FunctionalSpec, InequalityReport, Verdict, check
from .mappings import HarmonicMapping, QuasiconformalParams
from .radii import catalog, radius, solve

__version__ = "0.1.0"

__all__ = [
    "BoundedValue",
    "CoefficientSequence",
    "FunctionalSpec",
    "HarmonicMapping",
    "InequalityReport",
    "QuasiconformalParams",
    "TailBound",
    "Verdict",
    "catalog",
    "check",
    "radius",
    "solve",
]
