"""
Low-level exact arithmetic and logging helpers
"""
