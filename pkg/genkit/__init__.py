"""
Генераторы тестовых экземпляров
"""
from .generator import perturb_development, random_affine, random_convex_octahedron
