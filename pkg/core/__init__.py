"""
Основные компоненты octa-affine
Определители Кэли-Менгера, модель октаэдра, группы условий, форматы файлов
"""

from .cm_core import SquaredDistanceMatrix, cm_determinant, embed_six_points, menger_conditions
from .octa_model import DiagonalSet, NaturalDevelopment, Octahedron3, develop, diagonals_of

__all__ = [
    "SquaredDistanceMatrix",
    "cm_determinant",
    "embed_six_points",
    "menger_conditions",
    "DiagonalSet",
    "NaturalDevelopment",
    "Octahedron3",
    "develop",
    "diagonals_of",
]
