"""
Utility functions for the min-max dynamics toolkit.

This package contains utilities used by the library and tools for consistent
path handling, validation, error management, and environment variable access.
"""
