"""Energy-constrained broadcast scheduling laboratory.

Thin Python layer over the C++ core: oracle throughput LPs, the
sigma-perturbed Gibbs solver, the per-node protocol rules and the
event-driven network simulator.
"""

try:
    from ._econcast import *  # noqa: F401,F403  (installed package layout)
    from . import _econcast as _core
except ImportError:  # build-tree layout: the extension sits on sys.path
    from _econcast import *  # noqa: F401,F403
    import _econcast as _core

__all__ = [name for name in dir(_core) if not name.startswith("_")]
