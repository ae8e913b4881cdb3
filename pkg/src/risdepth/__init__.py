"""RIS-aided FMCW sensing: channel simulation, codebook sweep and scene depth estimation."""

__version__ = "0.1.0"
