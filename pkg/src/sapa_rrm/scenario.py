"""Randomised target scenes for the Monte Carlo experiments."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .kbs import ControlGrid, Environment, RadarConstants, TaskSpec

RANGE_MIN = 10e3
ALTITUDE_CAP = 20e3
RNG_NAME = "numpy.PCG64"

# (maneuver std range [m/s^2], correlation time range [s]) per Singer type
SINGER_TYPES: Dict[str, Tuple[Tuple[float, float], Tuple[float, float]]] = {
    "I": ((20.0, 35.0), (10.0, 20.0)),
    "II": ((0.0, 5.0), (1.0, 4.0)),
    "III": ((5.0, 20.0), (30.0, 50.0)),
}

SCENE_VARIANTS = {"70km": 70e3, "250km": 250e3}


@dataclass(frozen=True)
class SceneParams:
    n_targets: int = 60
    range_max: float = 70e3
    n_high_priority: int = 12
    altitude_cap: float = ALTITUDE_CAP
    seed: int = 0
    range_min: float = RANGE_MIN

    def __post_init__(self):
        if not self.n_targets >= self.n_high_priority >= 0:
            raise ValueError("need n_targets >= n_high_priority >= 0")
        if not self.range_max > self.range_min:
            raise ValueError("range_max must exceed range_min")


@dataclass
class Target:
    env: Environment
    spec: TaskSpec
    singer_type: str = ""
    high_priority: bool = False


@dataclass
class GeneratedScene:
    targets: List[Target]
    metadata: Dict = field(default_factory=dict)

    def __len__(self):
        return len(self.targets)

    @property
    def environments(self) -> List[Environment]:
        return [t.env for t in self.targets]

    @property
    def specs(self) -> List[TaskSpec]:
        return [t.spec for t in self.targets]

    def to_json(self) -> str:
        rows = []
        for t in self.targets:
            spec = asdict(t.spec)
            grid = spec.pop("control_grid")
            rows.append(
                {
                    **asdict(t.env),
                    **spec,
                    "control_grid": {k: list(v) for k, v in grid.items()} if grid else None,
                    "singer_type": t.singer_type,
                    "high_priority": t.high_priority,
                }
            )
        return json.dumps({"metadata": self.metadata, "targets": rows}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "GeneratedScene":
        data = json.loads(text)
        env_keys = ("range", "theta_h", "theta_v", "rcs", "maneuver_std", "corr_time")
        targets = []
        for row in data["targets"]:
            grid = row.get("control_grid")
            targets.append(
                Target(
                    env=Environment(**{k: row[k] for k in env_keys}),
                    spec=TaskSpec(
                        weight=row["weight"],
                        q_min=row["q_min"],
                        q_max=row["q_max"],
                        control_grid=ControlGrid(**grid) if grid else None,
                    ),
                    singer_type=row.get("singer_type", ""),
                    high_priority=row.get("high_priority", False),
                )
            )
        return cls(targets, data.get("metadata", {}))

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GeneratedScene":
        return cls.from_json(Path(path).read_text())


def _arange(start: float, step: float, stop: float, digits: int = 9) -> Tuple[float, ...]:
    n = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, digits) for i in range(n))


def default_control_grid(consts: Optional[RadarConstants] = None, full_aperture: bool = False) -> ControlGrid:
    """Dwell 4:1.2:64 ms, update rate 0.2:0.2:6 Hz, elements 6:6:48 per axis."""
    t_d = tuple(round(v * 1e-3, 12) for v in _arange(4.0, 1.2, 64.0))
    f_t = _arange(0.2, 0.2, 6.0)
    n = tuple(int(v) for v in _arange(6, 6, 48))
    grid = ControlGrid(t_d, f_t, n, n)
    if full_aperture:
        grid = grid.full_aperture(consts or RadarConstants())
    return grid


def generate_scene(
    params: SceneParams,
    consts: Optional[RadarConstants] = None,
    grid: Optional[ControlGrid] = None,
    q_min: float = 3e-3,
    q_max: float = 1e-3,
) -> GeneratedScene:
    """Draw one scene; identical ``params`` give identical scenes.

    Angles are drawn in the ground frame and returned as array-face angles
    (vertical angle minus the array tilt). Weights are normalised to sum 1.
    """
    consts = consts or RadarConstants()
    grid = grid or default_control_grid(consts)
    rng = np.random.Generator(np.random.PCG64(params.seed))

    k = params.n_targets
    types = list(SINGER_TYPES)
    raw_weights = []
    drawn = []
    for i in range(k):
        theta_h = math.radians(rng.uniform(-60.0, 60.0))
        theta_v = math.radians(rng.uniform(0.0, 70.0))
        rcs = 10.0 ** (rng.uniform(-10.0, 10.0) / 10.0)
        rng_m = rng.uniform(params.range_min, params.range_max)
        if rng_m * math.sin(theta_v) > params.altitude_cap:
            altitude = rng.uniform(0.0, params.altitude_cap)
            theta_v = math.asin(altitude / rng_m)
        singer = types[int(rng.integers(len(types)))]
        (s_lo, s_hi), (c_lo, c_hi) = SINGER_TYPES[singer]
        maneuver_std = rng.uniform(s_lo, s_hi)
        corr_time = rng.uniform(c_lo, c_hi)
        high = i < params.n_high_priority
        raw_weights.append(rng.uniform(0.7, 0.9) if high else rng.uniform(0.2, 0.5))
        drawn.append((rng_m, theta_h, theta_v - consts.tilt, rcs, maneuver_std, corr_time, singer, high))

    total = math.fsum(raw_weights)
    targets = []
    for w, (r, th, tv, rcs, ms, ct, singer, high) in zip(raw_weights, drawn):
        targets.append(
            Target(
                env=Environment(r, th, tv, rcs, ms, ct),
                spec=TaskSpec(weight=w / total, q_min=q_min, q_max=q_max, control_grid=grid),
                singer_type=singer,
                high_priority=high,
            )
        )
    meta = {
        "seed": params.seed,
        "rng": RNG_NAME,
        "n_targets": k,
        "range_max": params.range_max,
        "n_high_priority": params.n_high_priority,
        "tilt": consts.tilt,
    }
    return GeneratedScene(targets, meta)
