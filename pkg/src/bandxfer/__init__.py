"""Random band matrices: Monte Carlo characteristic-polynomial correlations and
a numerical transfer-operator analysis of their second mixed moment.

Submodules: ensemble, saddle, hermite, angular, transfer, cli.
"""
__version__ = "0.1.0"
