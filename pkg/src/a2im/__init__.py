"""Immersion search, certificates and verification sweeps for graphs with α ≤ 2."""

from .graph import Graph
from .immersion import ImmersionCertificate, TargetSpec, find_immersion, verify_certificate
from .version import __version__

__all__ = [
    "Graph",
    "ImmersionCertificate",
    "TargetSpec",
    "__version__",
    "find_immersion",
    "verify_certificate",
]
