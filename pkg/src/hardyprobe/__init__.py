"""hardyprobe - numerical probes of weighted Hardy and Sobolev-type inequalities."""

__version__ = "0.3.0"
