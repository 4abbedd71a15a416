"""eropc: a batch compiler from EROP contracts to Augmented Drools rule files."""

__version__ = "0.1.0"

from .codegen import translate

__all__ = ["translate", "__version__"]
