"""
Решение об аффинной эквивалентности
"""
from .affine_decision import AffineMap, Decision, decide, recover_affine_map
