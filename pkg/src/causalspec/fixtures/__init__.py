"""Bundled model fixtures, shipped as package data."""

from __future__ import annotations

from importlib import resources

from ..dsl import ModelDocument, parse


def fixture_source(name: str) -> str:
    """Raw DSL text of a bundled fixture (without the .cdag suffix)."""
    return resources.files(__package__).joinpath(f"{name}.cdag").read_text(encoding="utf-8")


def motor_source() -> str:
    return fixture_source("motor")


def motor_document() -> ModelDocument:
    return parse(motor_source())
