"""Neural candidate generator for reactive synthesis.

Speaks the portfolio's JSON-over-HTTP wire protocol: tokenizes incoming
assume-guarantee specifications, decodes candidate AIGER circuits with a
hierarchical transformer and beam search, verifies candidates through a
model-checking endpoint, and answers with the first verified solution.
"""

__version__ = "0.1.0"
