"""Toda-type lattices: exact bi-Hamiltonian verification and numerics."""
