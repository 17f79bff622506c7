"""Joint quasi-distribution toolkit: physics marginals, color codec, and generator inference."""

try:
    from . import _quasijoint as _impl  # installed layout
except ImportError:  # development layout: extension module on sys.path
    import _quasijoint as _impl

from_impl = [name for name in dir(_impl) if not name.startswith("_")]
globals().update({name: getattr(_impl, name) for name in from_impl})
__all__ = from_impl
