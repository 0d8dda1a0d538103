"""Figure rendering for spinmetro CSV datasets."""

from .render import FigureJob, SchemaMismatch, render

__version__ = "0.1.0"
