from ._clews import *  # noqa: F401,F403
