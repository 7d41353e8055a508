# Bumped by hand on release; written into every result record.
__version__ = "1.0.0"
