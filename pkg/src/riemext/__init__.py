"""Numerical checks for natural Riemann extensions of cotangent bundles.

The modules build the neutral metric on ``T*M`` from a torsion-free connection,
its almost para-Hermitian structure, level-set hypersurfaces with their induced
almost paracontact metric structures, and classify the latter.
"""

__version__ = "0.1.0"
