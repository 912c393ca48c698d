"""Avatar synergy/opposition embeddings learned from 5v5 match outcomes.

Subpackages: model (scoring), training, data, baselines, evaluation,
queries (similarity / pair / draft recommendation), model_io (persistence),
service (HTTP facade), cli.
"""

__version__ = "0.1.0"
