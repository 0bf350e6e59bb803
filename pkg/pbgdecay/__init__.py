# Package version for pbgdecay
__version__ = "0.3.0"
