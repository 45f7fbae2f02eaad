"""Corpus toolkit for orthographic variation in low-resource languages.

Builds frequency-weighted spelling-variant lexicons from correction logs,
destandardises or normalises text deterministically, quantifies divergence
(WER/CER), produces standard / non-standard / combined dataset variants for
classification tasks, aggregates fine-tuning results into train x test
matrices, and validates sociolinguistic language cards.
"""

__version__ = "0.1.0"
