"""Classical metapotential geometry, phase diagram, EBK counting, WKB splitting.

All geometric quantities live in the rescaled (x, p) frame with [x, p] = i
and unit scale (lambda = 1), where the classical surface reads

    H_cl = delta r^2 / 2 - kerr r^4 / 4 + eps2 r^2 cos(2 theta).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhaseRegion",
    "MetapotentialGeometry",
    "EbkCount",
    "classify_phase",
    "metapotential_classical",
    "geometry",
    "separatrix_area",
    "separatrix_area_double_node",
    "separatrix_area_triple_node",
    "ebk_levels_exact",
    "ebk_levels_approx",
    "ebk_bound_state_count",
    "wkb_splitting",
    "classical_frame_scale",
    "to_classical_frame",
]


class PhaseRegion(enum.Enum):
    SINGLE_NODE = "single-node"
    DOUBLE_NODE = "double-node"
    TRIPLE_NODE = "triple-node"


def classify_phase(delta: float, eps2: float) -> PhaseRegion:
    """Phase of the classical metapotential; transitions at delta = +/- 2 eps2."""
    if delta < -2 * eps2:
        return PhaseRegion.SINGLE_NODE
    if delta < 2 * eps2:
        return PhaseRegion.DOUBLE_NODE
    return PhaseRegion.TRIPLE_NODE


def metapotential_classical(x, p, delta: float, eps2: float, kerr: float = 1.0):
    """Classical metapotential surface at (x, p); zero at the origin."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    r2 = x * x + p * p
    val = delta * r2 / 2 - kerr * r2 * r2 / 4 + eps2 * (x * x - p * p)
    return val if val.shape else float(val)


@dataclass(frozen=True)
class MetapotentialGeometry:
    region: PhaseRegion
    node_distance: float
    saddle_distance: float
    node_depth: float
    saddle_depth: float
    barrier_height: float
    separatrix_area: float


def geometry(delta: float, eps2: float, kerr: float = 1.0) -> MetapotentialGeometry:
    """Closed-form geometry of the double-well surface (zeros in single-node)."""
    region = classify_phase(delta, eps2)
    if region is PhaseRegion.SINGLE_NODE:
        return MetapotentialGeometry(region, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    node_dist = 2 * math.sqrt((delta + 2 * eps2) / kerr)
    node_depth = (delta + 2 * eps2) ** 2 / (4 * kerr)
    if region is PhaseRegion.DOUBLE_NODE:
        saddle_dist = 0.0
        saddle_depth = 0.0
        barrier = node_depth
    else:
        saddle_dist = 2 * math.sqrt((delta - 2 * eps2) / kerr)
        saddle_depth = (delta - 2 * eps2) ** 2 / (4 * kerr)
        barrier = 2 * delta * eps2 / kerr
    return MetapotentialGeometry(region, node_dist, saddle_dist, node_depth,
                                 saddle_depth, barrier,
                                 separatrix_area(delta, eps2, kerr))


def separatrix_area_double_node(delta: float, eps2: float, kerr: float = 1.0) -> float:
    """Lemniscate-lobe closed form, valid for -2 eps2 <= delta <= 2 eps2."""
    u = delta / (2 * eps2)
    return (delta / kerr) * math.acos(-u) + (2 * eps2 / kerr) * math.sqrt(max(1 - u * u, 0.0))


def separatrix_area_triple_node(delta: float, eps2: float, kerr: float = 1.0) -> float:
    """Bean-shape closed form, valid for delta >= 2 eps2."""
    return (4 * eps2 / kerr) * math.sqrt(max(delta / (2 * eps2) - 1, 0.0)) \
        + (2 * delta / kerr) * math.asin(math.sqrt(2 * eps2 / delta))


def separatrix_area(delta: float, eps2: float, kerr: float = 1.0) -> float:
    """Area of one separatrix lobe (lemniscate half / bean), closed form."""
    region = classify_phase(delta, eps2)
    if region is PhaseRegion.SINGLE_NODE or eps2 == 0:
        return 0.0
    if region is PhaseRegion.DOUBLE_NODE:
        return separatrix_area_double_node(delta, eps2, kerr)
    return separatrix_area_triple_node(delta, eps2, kerr)


def ebk_levels_exact(delta: float, eps2: float, kerr: float = 1.0) -> float:
    """In-well level estimate area/(2 pi) - 1/2 from the exact lobe area."""
    return separatrix_area(delta, eps2, kerr) / (2 * math.pi) - 0.5


def ebk_levels_approx(delta: float, eps2: float, kerr: float = 1.0) -> float:
    """Branch approximation of the level count (kept verbatim for reference;
    its double-node delta coefficient is inconsistent with the exact lobe
    area, see :func:`ebk_levels_exact`)."""
    if classify_phase(delta, eps2) is PhaseRegion.TRIPLE_NODE:
        return math.sqrt(8 * eps2 * delta) / (kerr * math.pi) - 0.5
    return (delta / kerr) / 2 + (eps2 / kerr) / math.pi - 0.5


@dataclass(frozen=True)
class EbkCount:
    n_exact: float          # area/2pi - 1/2, exact lobe area
    n_approx: float         # branch approximation
    total_in_well: int      # nearest integer to n_exact, clamped >= 0
    excited_states: int     # total_in_well - 1, clamped >= 0
    at_boundary: bool       # delta == 2 eps2: approx formula is discontinuous


def ebk_bound_state_count(delta: float, eps2: float, kerr: float = 1.0) -> EbkCount:
    """Semiclassical in-well state count from EBK action quantization.

    The integer interpretation rounds the real-valued estimate: the total
    number of in-well levels per well is round(area/2pi - 1/2) and the
    excited-state count is one less.
    """
    n_exact = ebk_levels_exact(delta, eps2, kerr)
    n_approx = ebk_levels_approx(delta, eps2, kerr)
    total = max(int(round(n_exact)), 0)
    return EbkCount(n_exact, n_approx, total, max(total - 1, 0),
                    at_boundary=(delta == 2 * eps2))


def wkb_splitting(delta: float, eps2: float, kerr: float = 1.0) -> float:
    """Semiclassical tunnel splitting f cos(theta) exp(-A) of the ground pair.

    theta = (pi/2)(delta/kerr - 1) makes the splitting vanish exactly at
    delta = 2 m kerr.  Intended validity delta/kerr >> 1; evaluable for any
    delta > 0.  The returned sign encodes the bonding/antibonding alternation
    (opposite phase to the even-minus-odd convention of
    :func:`kerrcat.spectra.tunnel_splitting`).
    """
    if delta <= 0:
        raise ValueError(f"wkb_splitting requires delta > 0, got {delta}")
    if eps2 <= 0:
        raise ValueError(f"wkb_splitting requires eps2 > 0, got {eps2}")
    dk = delta / kerr
    r = delta / (2 * eps2)
    f = 2 * (4 * eps2 / kerr) ** 2 * math.sqrt(kerr / (math.pi * delta)) \
        * (1 + r) ** 1.25
    theta = math.pi / 2 * (dk - 1)
    action = (2 * eps2 / kerr) * math.sqrt(r + 1) \
        + dk * math.log(math.sqrt(1 / r) + math.sqrt(1 + 1 / r))
    return f * math.cos(theta) * math.exp(-action)


def classical_frame_scale(kerr: float, eps2: float) -> float:
    """Phase-space scale lambda = K / (2 eps2) of the classical-limit frame."""
    if eps2 <= 0:
        raise ValueError("classical frame scale requires eps2 > 0")
    return kerr / (2 * eps2)


def to_classical_frame(x, p, kerr: float, eps2: float):
    """Rescale lambda=1 coordinates into the lambda = K/2eps2 frame."""
    lam = classical_frame_scale(kerr, eps2)
    s = math.sqrt(lam)
    return np.asarray(x) * s, np.asarray(p) * s
