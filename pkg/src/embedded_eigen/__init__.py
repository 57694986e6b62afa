"""embedded-eigen: ingebedde eigenwaarden voor periodieke Schrödinger- en Jacobi-operatoren."""

from embedded_eigen.app.version import __version__

__all__ = ["__version__"]
