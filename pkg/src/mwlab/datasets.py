"""Bundled example systems shipped as JSON documents in mwlab/data."""

import json
from importlib import resources

from .errors import SpecValidationError
from .specio import parse_spec_document

__all__ = ["list_bundled", "bundled_document", "load_bundled", "bundled_text"]


def _data_root():
    return resources.files(__package__) / "data"


def list_bundled():
    """Names of the bundled example systems, sorted."""
    return sorted(p.name[:-5] for p in _data_root().iterdir()
                  if p.name.endswith(".json"))


def bundled_text(name):
    path = _data_root() / f"{name}.json"
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SpecValidationError(
            f"no bundled example named {name!r}; available: "
            f"{', '.join(list_bundled())}") from None


def bundled_document(name):
    return json.loads(bundled_text(name))


def load_bundled(name):
    """Parse a bundled example into a validated system."""
    return parse_spec_document(bundled_document(name))
