"""Golden membrane systems shipped with the package."""

from importlib import resources

NAMES = ("pi1", "intro1", "intro2")


def path(name: str):
    return resources.files(__name__) / f"{name}.psys"


def load(name: str):
    from ..parser import parse

    return parse(path(name).read_text(encoding="utf-8"))
