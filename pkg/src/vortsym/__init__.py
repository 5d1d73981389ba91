"""Lie symmetry analysis of the barotropic vorticity equation."""
