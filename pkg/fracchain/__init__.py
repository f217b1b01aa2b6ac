"""
fracchain

Numerical lab for long-range discrete Gaussian chains, the Bessel walks that
generate their couplings, lattice Green functions and the fractional Brownian
motion limits of the chains.
"""

__version__ = "0.1.0"
