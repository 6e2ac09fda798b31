"""Exact Milnor K-theory symbol calculus with certificate-emitting decompositions."""

try:
    from symlen._core import *  # noqa: F401,F403
    from symlen import _core  # noqa: F401
except ImportError:  # build-tree layout: module next to the sources
    from _core import *  # noqa: F401,F403
    import _core  # noqa: F401

__version__ = "0.1.0"
