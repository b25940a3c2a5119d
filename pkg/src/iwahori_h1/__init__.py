"""Hecke-module structure of the first pro-p Iwahori cohomology of mod-p principal series of GL_n."""

__version__ = "0.1.0"
