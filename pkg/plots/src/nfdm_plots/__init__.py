"""Figure rendering for nfdm experiment outputs."""

from .render import FigureSpec, render

__version__ = "0.1.0"
