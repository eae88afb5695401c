"""
Computation services for the minimal balanced collections toolkit
"""
