"""Python interface to the cavity cross-phase-modulation simulator."""

try:
    # Installed package layout: the extension lives inside xpm_sim/.
    from ._xpm_core import *  # noqa: F401,F403
    from . import _xpm_core as _core
except ImportError:
    # Build-tree layout: the extension sits next to the package on sys.path.
    from _xpm_core import *  # noqa: F401,F403
    import _xpm_core as _core

__version__ = _core.__version__
