"""reasonweave: interactive reasoning trees for chain-of-thought models.

Parse a model's tagged reasoning into an editable topic tree, pause at
flagged questions for human input, serialize the edited tree back into
the model's thinking context to regenerate the answer, and link answer
sentences to the reasoning nodes that support them.
"""
from . import chain, engine, operators, providers

__version__ = "0.1.0"

__all__ = ["chain", "engine", "operators", "providers", "__version__"]
