"""Exact quantum periods via Griffiths-Dwork reduction and a Weyl-algebra matrix representation."""

__version__ = "0.1.0"
