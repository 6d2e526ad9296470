"""Simulated slider and door mechanisms.

Generates randomized mechanism instances, renders them to 64x64 grayscale
context images, and executes parameterized actions against an analytic
constraint model:

  - sliders reward the projection of the commanded motion onto the track
    direction, clamped to the track length;
  - doors reward the commanded opening angle scaled by a Gaussian falloff
    on the mismatch between commanded and true (radius, axis pitch).

All functions are pure and deterministic; a mechanism is fully determined
by its (kind, seed) pair.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

IMAGE_SIZE = 64
PIXELS_PER_METER = 100.0
_CENTER = 32.0

# Door reward falloff widths. Chosen so the rewarding region is a small
# fraction of the action space and random sampling mostly yields no motion.
DOOR_SIGMA_RADIUS = 0.025
DOOR_SIGMA_PITCH = 0.15
DOOR_MAX_ANGLE = math.pi / 2
# Achieved opening angles below this count as no motion at all.
DOOR_MIN_ANGLE = 1e-3

_TRACK_INTENSITY = 0.8
_DOOR_FILL = 0.6
_HINGE_INTENSITY = 0.3
_DOOR_PANEL_HEIGHT_PX = 40.0


class MechanismKind(str, Enum):
    SLIDER = "slider"
    DOOR = "door"


class BoundsViolation(ValueError):
    """Raised when an action lies outside the action space of its kind."""


@dataclass(frozen=True)
class SliderParams:
    track_angle: float  # [0, pi)
    track_length: float  # [0.10, 0.50] m
    handle_offset: tuple[float, float]  # track start relative to canvas center, m


@dataclass(frozen=True)
class DoorParams:
    radius: float  # [0.05, 0.30] m
    hinge_sign: int  # +1 or -1
    axis_pitch: float  # [-pi/4, pi/4]
    max_angle: float  # fixed at pi/2


@dataclass(frozen=True)
class Mechanism:
    kind: MechanismKind
    params: SliderParams | DoorParams
    seed: int


@dataclass(frozen=True)
class ActionBounds:
    low: tuple[float, ...]
    high: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.low) != len(self.high):
            raise ValueError("low/high dimension mismatch")
        if not all(lo < hi for lo, hi in zip(self.low, self.high)):
            raise ValueError("bounds require low < high in every dimension")

    @property
    def dim(self) -> int:
        return len(self.low)

    def contains(self, action: np.ndarray) -> bool:
        a = np.asarray(action, dtype=float)
        if a.shape != (self.dim,):
            return False
        return bool(np.all(a >= self.low) and np.all(a <= self.high))

    def clip(self, action: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(action, dtype=float), self.low, self.high)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.low, dtype=float), np.asarray(self.high, dtype=float)


# Slider actions are (pitch, magnitude); door actions are (radius, angle, pitch).
# The door radius interval is closed at 0 so lattice search and clipping stay
# simple; commanding radius 0 is far off any true radius and earns ~nothing.
_SLIDER_BOUNDS = ActionBounds(low=(-math.pi, -0.60), high=(math.pi, 0.60))
_DOOR_BOUNDS = ActionBounds(
    low=(0.0, -math.pi, -math.pi / 2), high=(0.40, math.pi, math.pi / 2)
)

_KIND_CODE = {MechanismKind.SLIDER: 1, MechanismKind.DOOR: 2}


def action_bounds(kind: MechanismKind) -> ActionBounds:
    return _SLIDER_BOUNDS if kind is MechanismKind.SLIDER else _DOOR_BOUNDS


def generate_mechanism(kind: MechanismKind, seed: int) -> Mechanism:
    """Draw a random mechanism of the given kind; same seed, same mechanism."""
    rng = np.random.default_rng(np.random.SeedSequence([_KIND_CODE[kind], int(seed)]))
    if kind is MechanismKind.SLIDER:
        params: SliderParams | DoorParams = SliderParams(
            track_angle=float(rng.uniform(0.0, math.pi)),
            track_length=float(rng.uniform(0.10, 0.50)),
            handle_offset=(
                float(rng.uniform(-0.15, 0.15)),
                float(rng.uniform(-0.15, 0.15)),
            ),
        )
    else:
        params = DoorParams(
            radius=float(rng.uniform(0.05, 0.30)),
            hinge_sign=1 if int(rng.integers(0, 2)) == 1 else -1,
            axis_pitch=float(rng.uniform(-math.pi / 4, math.pi / 4)),
            max_angle=DOOR_MAX_ANGLE,
        )
    return Mechanism(kind=kind, params=params, seed=int(seed))


def execute_action(mechanism: Mechanism, action: np.ndarray) -> float:
    """Distance the mechanism moves under the action, in meters.

    The mechanism resets before every action; there is no hidden state.
    Raises BoundsViolation for actions outside the kind's action space.
    """
    bounds = action_bounds(mechanism.kind)
    a = np.asarray(action, dtype=float)
    if not bounds.contains(a):
        raise BoundsViolation(
            f"action {a.tolist()} outside bounds for {mechanism.kind.value}"
        )
    if mechanism.kind is MechanismKind.SLIDER:
        p = mechanism.params
        pitch, magnitude = float(a[0]), float(a[1])
        travel = magnitude * math.cos(pitch - p.track_angle)
        return float(min(max(travel, 0.0), p.track_length))
    p = mechanism.params
    r_cmd, q_cmd, pitch_cmd = float(a[0]), float(a[1]), float(a[2])
    falloff = math.exp(
        -((r_cmd - p.radius) ** 2) / (2.0 * DOOR_SIGMA_RADIUS**2)
        - ((pitch_cmd - p.axis_pitch) ** 2) / (2.0 * DOOR_SIGMA_PITCH**2)
    )
    angle = min(max(p.hinge_sign * q_cmd * falloff, 0.0), p.max_angle)
    if angle < DOOR_MIN_ANGLE:
        angle = 0.0
    return p.radius * angle


def oracle_optimal(mechanism: Mechanism) -> tuple[np.ndarray, float]:
    """Analytically optimal action and its reward, for evaluation only."""
    if mechanism.kind is MechanismKind.SLIDER:
        p = mechanism.params
        return np.array([p.track_angle, p.track_length]), p.track_length
    p = mechanism.params
    action = np.array([p.radius, p.hinge_sign * p.max_angle, p.axis_pitch])
    return action, p.radius * p.max_angle


def _segment_coverage(
    xs: np.ndarray, ys: np.ndarray, p0: tuple[float, float], p1: tuple[float, float]
) -> np.ndarray:
    """Anti-aliased coverage of a 2px-wide segment on the pixel grid."""
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    length_sq = dx * dx + dy * dy
    rx, ry = xs - p0[0], ys - p0[1]
    if length_sq > 0.0:
        t = np.clip((rx * dx + ry * dy) / length_sq, 0.0, 1.0)
    else:
        t = 0.0
    dist = np.hypot(rx - t * dx, ry - t * dy)
    return np.clip(1.5 - dist, 0.0, 1.0)


def _stamp_square(image: np.ndarray, x: float, y: float, half: int, value: float) -> None:
    ci, cj = int(round(y)), int(round(x))
    i0, i1 = max(ci - half, 0), min(ci + half + 1, IMAGE_SIZE)
    j0, j1 = max(cj - half, 0), min(cj + half + 1, IMAGE_SIZE)
    if i0 < i1 and j0 < j1:
        image[i0:i1, j0:j1] = value


def render(mechanism: Mechanism) -> np.ndarray:
    """Render the mechanism to a 64x64 grayscale image with values in [0, 1].

    Sliders: a 2px anti-aliased track segment starting at the handle
    position, drawn at the track angle with screen length 100 px per meter,
    plus a bright 5x5 handle square at the start. Doors: a filled panel of
    width 100 px per meter of radius rotated by the axis pitch, the hinge
    edge darkened, and a bright 3x3 handle dot on the opposite edge.
    """
    ys, xs = np.mgrid[0:IMAGE_SIZE, 0:IMAGE_SIZE].astype(float)
    image = np.zeros((IMAGE_SIZE, IMAGE_SIZE))
    if mechanism.kind is MechanismKind.SLIDER:
        p = mechanism.params
        x0 = _CENTER + PIXELS_PER_METER * p.handle_offset[0]
        y0 = _CENTER - PIXELS_PER_METER * p.handle_offset[1]
        length_px = PIXELS_PER_METER * p.track_length
        x1 = x0 + length_px * math.cos(p.track_angle)
        y1 = y0 - length_px * math.sin(p.track_angle)
        image = _TRACK_INTENSITY * _segment_coverage(xs, ys, (x0, y0), (x1, y1))
        _stamp_square(image, x0, y0, half=2, value=1.0)
        return image
    p = mechanism.params
    half_w = 0.5 * PIXELS_PER_METER * p.radius
    half_h = 0.5 * _DOOR_PANEL_HEIGHT_PX
    cpsi, spsi = math.cos(p.axis_pitch), math.sin(p.axis_pitch)
    dx, dy = xs - _CENTER, ys - _CENTER
    du = cpsi * dx + spsi * dy
    dv = -spsi * dx + cpsi * dy
    body = np.clip(0.5 + np.minimum(half_w - np.abs(du), half_h - np.abs(dv)), 0.0, 1.0)
    image = _DOOR_FILL * body
    u_hinge = -p.hinge_sign * half_w
    hinge_band = (np.abs(du - u_hinge) <= 1.0) & (np.abs(dv) <= half_h)
    image[hinge_band] = _HINGE_INTENSITY
    u_handle = p.hinge_sign * half_w
    handle_x = _CENTER + cpsi * u_handle
    handle_y = _CENTER + spsi * u_handle
    _stamp_square(image, handle_x, handle_y, half=1, value=1.0)
    return image


def write_pgm(image: np.ndarray, path: str | Path) -> None:
    """Dump a grayscale image as binary 8-bit PGM (P5) for inspection."""
    levels = np.clip(np.rint(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)
    header = f"P5\n{levels.shape[1]} {levels.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + levels.tobytes())


def mechanism_to_dict(mechanism: Mechanism) -> dict:
    if mechanism.kind is MechanismKind.SLIDER:
        p = mechanism.params
        params = {
            "track_angle": p.track_angle,
            "track_length": p.track_length,
            "handle_offset": list(p.handle_offset),
        }
    else:
        p = mechanism.params
        params = {
            "radius": p.radius,
            "hinge_sign": p.hinge_sign,
            "axis_pitch": p.axis_pitch,
            "max_angle": p.max_angle,
        }
    return {"kind": mechanism.kind.value, "seed": mechanism.seed, "params": params}


def mechanism_from_dict(data: dict) -> Mechanism:
    kind = MechanismKind(data["kind"])
    raw = data["params"]
    if kind is MechanismKind.SLIDER:
        params: SliderParams | DoorParams = SliderParams(
            track_angle=float(raw["track_angle"]),
            track_length=float(raw["track_length"]),
            handle_offset=(float(raw["handle_offset"][0]), float(raw["handle_offset"][1])),
        )
    else:
        params = DoorParams(
            radius=float(raw["radius"]),
            hinge_sign=int(raw["hinge_sign"]),
            axis_pitch=float(raw["axis_pitch"]),
            max_angle=float(raw["max_angle"]),
        )
    return Mechanism(kind=kind, params=params, seed=int(data["seed"]))


def mechanism_to_json(mechanism: Mechanism) -> str:
    return json.dumps(mechanism_to_dict(mechanism))


def mechanism_from_json(text: str) -> Mechanism:
    return mechanism_from_dict(json.loads(text))
