"""pathqa: extract cancer types and histologic subtypes from OCR'd
pathology-report text via extractive question answering, with ontology
normalization and answer-quality metrics."""

__version__ = "0.1.0"
