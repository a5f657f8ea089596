"""stele: digital monuments grown from commemorative social-media corpora.

The pipeline ingests post corpora and author metrics, scores posts by
time-decayed engagement, extracts per-author keyword sets, maps
normalized metrics to bifurcated column heights, and synthesizes
deterministic point-cloud scene documents. A small HTTP service exposes
the scenes, keyword drill-downs and a moderated tribute inbox that
grows the monuments over time.
"""

__version__ = "0.1.0"
