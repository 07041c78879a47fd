"""Dense simulation of ancilla thermalisation, repeat-until-success and fixed-point OAA."""
__version__ = "0.1.0"
