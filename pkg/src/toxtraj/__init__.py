"""Toxicity trajectory extraction and knowledge-graph maintenance for plastic pollutants."""

__version__ = "0.1.0"
