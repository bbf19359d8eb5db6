"""Exception types shared across the package.

Everything raised on purpose derives from WinoconvError so callers can
catch one base class at the CLI boundary.
"""


class WinoconvError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(WinoconvError):
    """A convolution geometry is inconsistent (nonpositive output, bad pad, ...)."""


class SizeError(WinoconvError):
    """An array or buffer has the wrong number of elements or dimensions."""


class LayoutError(WinoconvError):
    """An operation got a tensor in a layout it does not accept."""


class ConstructionError(WinoconvError):
    """Transform generation failed (bad points, degenerate system, ...)."""


class ArityError(ConstructionError):
    """The interpolation point list has the wrong length for (m, r)."""


class UnsupportedVariantError(WinoconvError):
    """The requested tile/kernel combination is outside what the engine supports."""


class InputError(WinoconvError):
    """User-supplied input (CLI argument, layer file, tensor file) is invalid."""
