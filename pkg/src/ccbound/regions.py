"""Classification of the two-parameter correlation slice into local,
zero-key, positive-bound and non-quantum regions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .attack import critical_visibility

ATOL = 1e-12


class RegionLabel(str, Enum):
    LOCAL = "LOCAL"
    RED_ZERO_KEY = "RED_ZERO_KEY"
    BLUE_POSITIVE_BOUND = "BLUE_POSITIVE_BOUND"
    OUTSIDE_QUANTUM = "OUTSIDE_QUANTUM"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RegionPoint:
    """A classified slice point with its polar form."""

    s: float
    t: float
    visibility: float
    theta: float
    label: RegionLabel


def classify(s: float, t: float) -> RegionPoint:
    """Label a slice point.

    LOCAL when |s| + |t| <= 1 (the four relabelled facets, closed set);
    OUTSIDE_QUANTUM when s^2 + t^2 > 1; otherwise RED_ZERO_KEY up to and
    including the critical visibility of the polar angle, BLUE_POSITIVE_BOUND
    above it.  Points outside the first quadrant are folded onto |s|, |t|.
    """
    fs, ft = abs(s), abs(t)
    visibility = math.hypot(fs, ft)
    theta = math.atan2(ft, fs)
    if fs + ft <= 1.0 + ATOL:
        label = RegionLabel.LOCAL
    elif visibility > 1.0 + ATOL:
        label = RegionLabel.OUTSIDE_QUANTUM
    elif visibility <= critical_visibility(theta):
        label = RegionLabel.RED_ZERO_KEY
    else:
        label = RegionLabel.BLUE_POSITIVE_BOUND
    return RegionPoint(float(s), float(t), visibility, theta, label)


def region_grid(resolution: int) -> list[RegionPoint]:
    """Classified points of the uniform grid over [0, 1]^2.

    Row-major with t as the outer loop and s as the inner loop.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    step = 1.0 / (resolution - 1)
    points = []
    for j in range(resolution):
        t = j * step
        for i in range(resolution):
            points.append(classify(i * step, t))
    return points


CSV_HEADER = "s,t,v,theta,label"


def format_point(point: RegionPoint) -> str:
    return (
        f"{point.s:.6f},{point.t:.6f},{point.visibility:.6f},"
        f"{point.theta:.6f},{point.label}"
    )


def write_region_csv(points, stream) -> None:
    """Write the slice classification as CSV (6-decimal fixed formatting).

    The leading comment line records the grid ordering.
    """
    stream.write("# grid ordering: row-major, t outer loop, s inner loop\n")
    stream.write(CSV_HEADER + "\n")
    for point in points:
        stream.write(format_point(point) + "\n")
