"""Bit-exact stochastic-computing simulator for deep convolutional networks."""

__version__ = "0.1.0"
