"""Signature-coded tree-splitting random access over a noiseless F_q adder channel.

The package has three layers: exact combinatorial machinery (signature
codebooks built from distinct-subset-sum integer sets), a slot-level protocol
simulator with and without successive interference cancellation, and an
analysis module evaluating the closed-form throughput and net-rate bounds.
The ``scra`` command line reproduces the reference tables and figures as CSV
files (optionally rendered to PNG).
"""

__version__ = "1.0.0"

from .errors import ArgumentError, CapabilityError, IntegrityError, ScraError

__all__ = [
    "__version__",
    "ScraError",
    "ArgumentError",
    "CapabilityError",
    "IntegrityError",
]
