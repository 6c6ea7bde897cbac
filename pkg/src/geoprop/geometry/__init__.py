from __future__ import annotations

from .manifold import Circle, FlatTorus, ManifoldKind, ManifoldModel, Sphere2, parse_manifold

__all__: list[str] = [
    "Circle",
    "FlatTorus",
    "ManifoldKind",
    "ManifoldModel",
    "Sphere2",
    "parse_manifold",
]
