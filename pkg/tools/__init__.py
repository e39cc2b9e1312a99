"""
Tools package for the min-max dynamics analyzer.

One module per command. Every tool returns a structured dictionary with
success/error information instead of raising, so the CLI and tests can call
them the same way.
"""
