"""Figure rendering for rivernet CSV artifacts.

Three figure kinds cover the simulation outputs: line plots of sweep
curves, contour maps of two-axis sweeps with the R0 = 1 level emphasized,
and per-edge steady-state profiles.  Rendering is a pure function of the
CSV bytes and the figure specification; styles, seeds, and metadata are
pinned so repeated renders are byte-identical.
"""

from .render import EmptyInput, FigureSpec, MissingColumn, render

__version__ = "0.1.0"
