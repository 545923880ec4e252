"""Issue-driven automated program repair toolkit.

Subpackages cover the full pipeline: benchmark ingestion, design-rationale
extraction, LLM gateway with replay caching, masked-corpus construction,
reference-patch providers, identifier recommendation, the repair
orchestration itself, and CodeBLEU-based evaluation.
"""

__version__ = "0.1.0"
