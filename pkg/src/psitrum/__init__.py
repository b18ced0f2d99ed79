"""Gate-model quantum computer simulator.

State-vector and algorithm-matrix circuit execution, depolarizing noise on
density matrices, per-stage Bloch tracing, a VQE prime-factorization workflow,
file exports, a CLI and an HTTP service for the browser circuit designer.
"""

__version__ = "0.1.0"
