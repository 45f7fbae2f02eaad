"""Fine-tuning harness for variaforge experiment manifests.

Consumes the toolkit's manifest JSON and dataset files, trains one small
encoder per grid cell, evaluates on all three test variants, and appends
score records to the shared results JSONL. All F1 numbers come from the
`variaforge metrics f1` CLI, never from code in this package.
"""

__version__ = "0.1.0"
