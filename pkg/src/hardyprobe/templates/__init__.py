"""Bundled experiment configs for `hardyprobe template`."""

from .registry import TEMPLATES, Template, get_template, load_template_yaml

__all__ = [
    "TEMPLATES",
    "Template",
    "get_template",
    "load_template_yaml",
]
