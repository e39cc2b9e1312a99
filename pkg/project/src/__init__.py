"""
Numerical library for GDA/OGDA min-max dynamics and stability analysis.
"""
