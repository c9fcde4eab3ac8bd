"""Figure rendering for aro-sim CSV output.

Strictly file-based: the CSV schema is the whole contract with the simulation
package, there is no in-process coupling.
"""

__version__ = "0.1.0"

from .render import FigureRequest, HeaderMismatchError, render

__all__ = ["FigureRequest", "HeaderMismatchError", "render"]
