"""Probabilistic storage and retrieval of qubit phase gates."""
