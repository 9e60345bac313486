"""Bundled QF_BV solver speaking the SMT-LIB2 pipe protocol.

Run as ``python -m patcheq.smtbv``.  Used as the default solver backend when
no external SMT solver is installed; any SMT-LIB2 bit-vector solver (for
example ``z3 -in``) is a drop-in replacement.
"""

from .protocol import SmtSession, run_stdio

__all__ = ["SmtSession", "run_stdio"]
