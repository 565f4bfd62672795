"""Python front end for the kdvlab C++ core."""

import json

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, IoError, NumericalError, __version__, _parse_config, _simulate


def parse_config(config):
    """Validate a config given as a dict or JSON text; returns the normalized dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_parse_config(text))


def simulate(config, y0=None):
    """Run one simulation; returns a dict of numpy columns plus run statistics.

    Set ``keep_fields`` in the config to also get a ``fields`` array of shape
    (records, n).
    """
    text = config if isinstance(config, str) else json.dumps(config)
    return _simulate(text, y0)


__all__ = [
    "ConfigError",
    "IoError",
    "NumericalError",
    "__version__",
    "parse_config",
    "simulate",
]
