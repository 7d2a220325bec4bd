"""Ontology-driven decision support for forensic dental age assessment."""

__version__ = "0.1.0"
