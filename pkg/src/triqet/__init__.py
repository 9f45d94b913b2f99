"""triqet: data-driven quantum encoding circuits with a small variational classifier.

Builds encoding circuits by greedy triplet-loss minimization over trace
distances, trains an RY/CNOT-ring classifier on the encoded states, and
benchmarks against amplitude/angle encoding baselines — all on the built-in
statevector simulator in :mod:`triqet.qsim`.
"""

__version__ = "0.1.0"
