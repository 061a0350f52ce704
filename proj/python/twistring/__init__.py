from ._twistring import *  # noqa: F401,F403
from ._twistring import __doc__  # noqa: F401
