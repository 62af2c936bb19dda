__version__ = "difftomo V0.1"
