"""rf-dressed clock shifts and second-order magic traps for J=1/2 alkali atoms."""

from ._rfmagic import *  # noqa: F401,F403
from ._rfmagic import __version__  # noqa: F401
