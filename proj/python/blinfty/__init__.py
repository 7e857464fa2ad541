"""Python bindings for the BL-infinity model toolkit."""

from ._core import handle_cz, parse_model, print_model, run, torsion, vdim

__all__ = ["handle_cz", "parse_model", "print_model", "run", "torsion", "vdim"]
