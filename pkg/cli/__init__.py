"""
Командная строка octa-affine
"""
from .commands import run
