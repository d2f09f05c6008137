"""Multi-label topic tagging for scientific metadata.

The pipeline ranks a corpus against a set of topics along two independent
routes, a synonym-set full-text search and a semantic topic classifier,
then fuses the two ranked lists per topic and inverts the fused lists into
per-article tag assignments.
"""

__version__ = "0.1.0"
