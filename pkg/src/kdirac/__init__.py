"""kdirac: 2D relativistic Dirac split-operator simulator for spin-resolved
Kapitza-Dirac diffraction in a Gaussian-beam standing light wave."""

__version__ = "0.1.0"
