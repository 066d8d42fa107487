"""Focused-crawl meta-search toolkit: proximity ranking, happiness-steered
best-first exploration, finite-state result-page wrappers, and relevance
feedback, with a simulator validating the exploration algorithms."""

__version__ = "0.1.0"
