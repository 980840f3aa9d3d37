"""
Восстановление диагоналей и координат по развертке
"""
from .reconstruct import ReconstructionResult, reconstruct, solve_diagonals
