"""External knowledge-graph neighbourhood lookup (fixture-backed)."""

from __future__ import annotations

from pathlib import Path

from ..errors import ConfigError
from ..schema import Entity


class FixtureKG:
    """Static adjacency file, one ``entity: neighbour, neighbour`` per line."""

    def __init__(self, adjacency=None):
        self.adjacency: dict[str, list[str]] = {}
        for entity, neighbours in (adjacency or {}).items():
            self.adjacency[entity.casefold()] = list(neighbours)

    @classmethod
    def load(cls, path) -> FixtureKG:
        adj = {}
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read KG fixture {path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            head, sep, tail = line.partition(":")
            if not sep or not head.strip():
                raise ConfigError(f"{path}:{lineno}: expected 'entity: n1, n2'")
            adj[head.strip()] = [n.strip() for n in tail.split(",") if n.strip()]
        return cls(adj)

    def neighbors(self, entity: Entity) -> list[Entity]:
        if not entity.surface:
            raise ValueError("entity surface must be non-empty")
        names = self.adjacency.get(entity.name.casefold())
        if names is None:
            names = self.adjacency.get(entity.surface.casefold(), [])
        own = {entity.surface.casefold(), entity.name.casefold()}
        return [Entity(n) for n in names if n.casefold() not in own]


def kg_neighbors(entity: Entity, source) -> list[Entity]:
    return source.neighbors(entity)
