"""
Minimal balanced collections toolkit - Main Package
"""

__version__ = "1.0.0"
