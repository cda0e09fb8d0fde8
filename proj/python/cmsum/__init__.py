"""Risk measures of counter-monotonic sums (compiled core in ``cmsum._core``)."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
