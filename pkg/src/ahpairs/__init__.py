"""Zeta-zero pair statistics and the Alternative Hypothesis.

Modules: ``zero_engine`` (Hardy Z, Gram points, certified zero search),
``zero_store`` (tables and caching), ``pairstats`` (empirical pair
statistics), ``models`` (reference predictions), ``synthetic`` (lattice
renewal processes) and ``cli``.
"""

__version__ = "0.1.0"
