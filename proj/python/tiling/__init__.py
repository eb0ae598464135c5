"""Python access to the lozenge tiling library."""

from ._tiling import *  # noqa: F401,F403
from ._tiling import __version__  # noqa: F401
