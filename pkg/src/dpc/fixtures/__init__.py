"""Fixture grammars shipped with the package."""

from importlib import resources

NAMES = ("listing1a", "listing1b", "listing1c", "listing3", "mini-ml", "mini-java-stmt", "arith")


def path(name: str):
    return resources.files(__name__) / f"{name}.def"


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
