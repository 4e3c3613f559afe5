"""Staircase initial data, the range it determines, and the evaluation order."""
from __future__ import annotations

from dataclasses import dataclass

from .solve import Direction

Point = tuple[int, int]


@dataclass(frozen=True)
class StaircaseSpec:
    l1: int
    l2: int
    N: int

    def __post_init__(self):
        if self.l1 == 0 or self.l2 == 0:
            raise ValueError("staircase steps must be nonzero")
        if self.N < 0:
            raise ValueError("number of steps must be >= 0")

    @property
    def direction(self) -> Direction:
        return Direction.from_signs(self.l1, self.l2)

    @classmethod
    def fundamental(cls, direction: Direction, N: int) -> "StaircaseSpec":
        s1, s2 = direction.signs
        return cls(s1, s2, N)

    @classmethod
    def parse(cls, text: str) -> "StaircaseSpec":
        parts = [int(x) for x in text.replace(" ", "").split(",")]
        if len(parts) != 3:
            raise ValueError("staircase must be given as l1,l2,N")
        return cls(*parts)


@dataclass(frozen=True)
class Step:
    """One evaluation: ``target`` is the unknown corner of the quad at ``base``."""

    target: Point
    base: Point
    sources: tuple[Point, Point, Point]
    layer: int


@dataclass
class Range:
    staircase: StaircaseSpec
    direction: Direction
    initial: list[Point]
    layers: list[list[Point]]  # layers[k-1] = points of iteration k, ordered along the staircase
    steps: dict[Point, Step]

    @property
    def points(self) -> list[Point]:
        return [p for layer in self.layers for p in layer]

    def index(self) -> dict[Point, tuple[int, int]]:
        """Grid index (l, m): l = iteration layer (1-based), m = position in layer (1-based)."""
        return {p: (k + 1, m + 1) for k, layer in enumerate(self.layers) for m, p in enumerate(layer)}

    def __len__(self) -> int:
        return sum(len(layer) for layer in self.layers)


def build_staircase(spec: StaircaseSpec) -> list[Point]:
    """Points of the regular staircase, starting at the origin."""
    s1 = 1 if spec.l1 > 0 else -1
    s2 = 1 if spec.l2 > 0 else -1
    i = j = 0
    pts = [(0, 0)]
    for _ in range(spec.N):
        for _ in range(abs(spec.l1)):
            i += s1
            pts.append((i, j))
        for _ in range(abs(spec.l2)):
            j += s2
            pts.append((i, j))
    return pts


def _order_key(direction: Direction):
    s1, s2 = direction.signs
    return lambda p: (s1 * p[0] + s2 * p[1], p[0], p[1])


def build_range(spec: StaircaseSpec, direction: Direction | None = None) -> Range:
    """Wavefront layers of lattice points computable from the staircase."""
    natural = spec.direction
    if direction is None:
        direction = natural
    if direction != natural:
        raise ValueError(
            f"direction {direction} is incompatible with staircase [{spec.l1},{spec.l2}] "
            f"(which evolves in direction {natural})")
    initial = build_staircase(spec)
    xs = [p[0] for p in initial]
    ys = [p[1] for p in initial]
    box = (min(xs), max(xs), min(ys), max(ys))
    ui, uj = direction.unknown
    offsets = [(ci - ui, cj - uj) for (ci, cj) in direction.known]

    known = set(initial)
    candidates = {(a, b) for a in range(box[0], box[1] + 1) for b in range(box[2], box[3] + 1)} - known
    layers: list[list[Point]] = []
    steps: dict[Point, Step] = {}
    key = _order_key(direction)
    while True:
        layer = []
        for p in candidates:
            srcs = tuple((p[0] + di, p[1] + dj) for di, dj in offsets)
            if all(s in known for s in srcs):
                layer.append(p)
        if not layer:
            break
        layer.sort(key=key)
        k = len(layers) + 1
        for p in layer:
            srcs = tuple((p[0] + di, p[1] + dj) for di, dj in offsets)
            steps[p] = Step(p, (p[0] - ui, p[1] - uj), srcs, k)
        known.update(layer)
        candidates.difference_update(layer)
        layers.append(layer)
    return Range(spec, direction, initial, layers, steps)


def schedule(rng: Range) -> list[Step]:
    """Layer-major, then along-staircase order; every source precedes its target."""
    return [rng.steps[p] for layer in rng.layers for p in layer]
