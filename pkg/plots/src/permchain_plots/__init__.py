"""Offline figure scripts over permchain's CSV/JSON outputs."""

from .arrhenius import plot_arrhenius
from .dhn import plot_dhn
from .io import PlotsError, read_arrhenius, read_dhn, read_trace
from .nine_panel import FigureSpec, plot_nine_panel

__version__ = "0.1.0"
