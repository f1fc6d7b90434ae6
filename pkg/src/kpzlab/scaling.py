"""Space-time lattice geometry for diffusively rescaled nearest-neighbor walks.

The walk lives on the even sublattice {(i, j): i >= 0, i + j even}.  For a
drift v and mesh epsilon, the affine map

    (i, j)  |->  (i * eps**2, (j - v * i) * eps)

sends the sublattice into the continuum half-plane; the images of the unit
rectangles [i, i+1) x [j, j+2) tessellate it with parallelogram cells of
area 2 * eps**3.  Snapping takes a continuum point to the lattice point
labelling its cell (bottom and left cell edges belong to the cell, top and
right do not).
"""

import math
from dataclasses import dataclass

# Points sitting within this many ulps of a cell edge are treated as lying
# exactly on it (the edge belongs to the cell above/right of it).  Decimal
# inputs like t=1.0, eps=0.1 land a few ulps off the intended edge after
# division; without this window they would snap into the wrong cell.
_EDGE_ULPS = 64


@dataclass(frozen=True)
class LatticePoint:
    """A site (i, j) of the even sublattice: i >= 0 and i + j even."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 0:
            raise ValueError(f"time index must be nonnegative, got {self.i}")
        if (self.i + self.j) % 2 != 0:
            raise ValueError(f"({self.i}, {self.j}) is not on the even sublattice")


@dataclass(frozen=True)
class ScalingFrame:
    """Mesh size and drift defining the rescaling map."""

    epsilon: float
    v: float

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.v < 1.0:
            raise ValueError(f"v must lie in (0, 1), got {self.v}")


@dataclass(frozen=True)
class SnappedPoint:
    """A lattice point together with its rescaled coordinates."""

    t_eps: float
    x_eps: float
    point: LatticePoint


def affine_map(frame: ScalingFrame, p: LatticePoint):
    """Rescaled coordinates (i * eps^2, (j - v*i) * eps) of a lattice point."""
    return p.i * frame.epsilon**2, (p.j - frame.v * p.i) * frame.epsilon


def _floor_to_edge(value: float) -> int:
    """Floor, snapping values within a few ulps of an integer up to it."""
    nearest = round(value)
    tol = _EDGE_ULPS * math.ulp(max(1.0, abs(value)))
    if abs(value - nearest) <= tol:
        return int(nearest)
    return math.floor(value)


def snap(frame: ScalingFrame, t: float, x: float) -> SnappedPoint:
    """Lattice point whose cell contains the continuum point (t, x).

    Requires t >= 0.  The preimage coordinates are T = t / eps^2 and
    X = x / eps + v * T; the cell is [i, i+1) x [j, j+2) in those
    coordinates with j of the same parity as i.
    """
    if not t >= 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    eps = frame.epsilon
    T = t / (eps * eps)
    i = _floor_to_edge(T)
    X = x / eps + frame.v * T
    j = _floor_to_edge(X)
    if (j - i) % 2 != 0:
        j -= 1
    point = LatticePoint(i, j)
    t_eps, x_eps = affine_map(frame, point)
    return SnappedPoint(t_eps, x_eps, point)
