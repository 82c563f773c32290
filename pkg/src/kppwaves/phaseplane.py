"""Phase-plane systems for the travelling-wave ODE and their certificates.

Substituting the wave ansatz into the canonical equation and rescaling turns
the profile ODE into a first-order system in (X, Y).  Two substitutions cover
the parameter space:

Case I (m + q > 2):
    X = f^(m+q-2),  Y = f^(m-2) f',  d_xi = X^((m-1)/gamma) d_tau
    X' = gamma X Y
    Y' = -Y (Y + c) + X - X^k,   k = (m+p-2)/(m+q-2) > 1, gamma = m+q-2

Case II (0 < m + q <= 2):
    X = f^k,  Y = sqrt((m+q)/2) f^((m-q-2)/2) f'
    X' = gamma X Y
    Y' = -Y (Y + c1 X^k1) + 1 - X^k2,   gamma = 2k/(m+q), c1 = c sqrt(2/(m+q))

with k = min{(2-m-q)/2, p-q} and the (k1, k2) branch rules below.  In both
cases the wave corresponds to a heteroclinic orbit between an equilibrium on
the Y axis and P2 = (1, 0), and the node/focus boundary of P2 reproduces the
critical speed 2 sqrt(p-q).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InvalidParameterError
from .model import CanonicalModel, Regime

__all__ = [
    "PhaseSystemI",
    "PhaseSystemII",
    "FixedPointKind",
    "FixedPointInfo",
    "build_system",
    "vector_field",
    "jacobian",
    "fixed_points",
    "dulac_divergence",
    "region_G_residual",
    "zero_speed_curve",
    "zero_speed_X0",
    "xpow",
]


def xpow(X, r: float):
    """X**r with explicit limits at X = 0: 0 for r > 0, 1 for r = 0.

    Raises DomainError for negative bases, and for X = 0 with r < 0.
    Accepts scalars or arrays.
    """
    arr = np.asarray(X, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError(f"negative base in X^{r}")
    if r == 0.0:
        out = np.ones_like(arr)
    elif r > 0.0:
        out = arr ** r
    else:
        if np.any(arr == 0.0):
            raise DomainError(f"X^{r} undefined at X = 0")
        out = arr ** r
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PhaseSystemI:
    """Case I coefficients. gamma = m+q-2 > 0, k = (m+p-2)/gamma > 1.

    c is the transformed-frame speed; build_system produces c >= 0 (negative
    original speeds are mapped through the mirror (c, X, Y) -> (-c, X, -Y)
    first), but the dataclass accepts any finite c so the mirror property
    itself can be tested.
    """

    gamma: float
    k: float
    c: float

    def __post_init__(self):
        if not (self.gamma > 0.0):
            raise InvalidParameterError(f"gamma must be positive, got {self.gamma!r}")
        if not (self.k > 1.0):
            raise InvalidParameterError(f"k must exceed 1 in Case I, got {self.k!r}")


@dataclass(frozen=True)
class PhaseSystemII:
    """Case II coefficients.

    k = min{(2-m-q)/2, p-q} (k = p-q when m+q = 2); the branch taken fixes
    (k1, k2):  k = (2-m-q)/2 -> k1 = 1, k2 = 2(p-q)/(2-m-q);
    k = p-q < (2-m-q)/2 -> k2 = 1, k1 = (2-m-q)/(2(p-q));
    m+q = 2 -> k1 = 0, k2 = 1.  In every branch k*k2 = p-q.
    """

    gamma: float
    k: float
    k1: float
    k2: float
    c1: float

    def __post_init__(self):
        if not (self.gamma > 0.0):
            raise InvalidParameterError(f"gamma must be positive, got {self.gamma!r}")
        if not (self.k > 0.0):
            raise InvalidParameterError(f"k must be positive, got {self.k!r}")
        if self.k1 < 0.0 or self.k2 <= 0.0:
            raise InvalidParameterError(f"bad exponents k1={self.k1!r}, k2={self.k2!r}")


PhaseSystem = PhaseSystemI | PhaseSystemII


class FixedPointKind(str, Enum):
    SADDLE_NODE = "SaddleNode"
    SADDLE = "Saddle"
    STABLE_NODE = "StableNode"
    STABLE_FOCUS = "StableFocus"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class FixedPointInfo:
    """Location, linearization, and kind of one equilibrium.

    ``degenerate`` marks the discriminant-zero boundary c = c*, where the
    kind is reported as StableNode (the approach is still non-spiralling
    there, so the boundary belongs with the monotone class).
    """

    name: str
    location: tuple[float, float]
    jacobian: tuple[tuple[float, float], tuple[float, float]]
    eigenvalues: tuple[complex, complex]
    kind: FixedPointKind
    degenerate: bool = False


def build_system(cm: CanonicalModel, c: float) -> PhaseSystem:
    """Construct the phase system for canonical model ``cm`` at speed c >= 0.

    Callers with a negative original speed must flip its sign first (the
    mirror symmetry maps the c < 0 question to c > 0).  c = 0 is accepted:
    it is the boundary case whose trajectories are explicit in Case I.
    """
    c = float(c)
    if not math.isfinite(c) or c < 0.0:
        raise InvalidParameterError(
            f"build_system needs c >= 0 (map negative speeds through the mirror), got {c!r}"
        )
    mq = cm.mq
    if cm.regime is Regime.CASE_I:
        gamma = mq - 2.0
        k = (cm.m + cm.p - 2.0) / gamma
        return PhaseSystemI(gamma=gamma, k=k, c=c)
    # Case II, including the boundary m+q = 2
    if mq == 2.0:
        k = cm.p - cm.q
        k1, k2 = 0.0, 1.0
    else:
        half = (2.0 - mq) / 2.0
        if half <= cm.p - cm.q:
            k = half
            k1 = 1.0
            k2 = 2.0 * (cm.p - cm.q) / (2.0 - mq)
        else:
            k = cm.p - cm.q
            k2 = 1.0
            k1 = (2.0 - mq) / (2.0 * (cm.p - cm.q))
    gamma = 2.0 * k / mq
    c1 = c * math.sqrt(2.0 / mq)
    return PhaseSystemII(gamma=gamma, k=k, k1=k1, k2=k2, c1=c1)


def vector_field(sys: PhaseSystem, X, Y):
    """Evaluate (dX/dtau, dY/dtau). Accepts scalars or broadcastable arrays.

    Raises DomainError for X < 0 (the systems live in the closed half-plane).
    """
    Xa = np.asarray(X, dtype=float)
    Ya = np.asarray(Y, dtype=float)
    if np.any(Xa < 0.0):
        raise DomainError("vector_field requires X >= 0")
    dX = sys.gamma * Xa * Ya
    if isinstance(sys, PhaseSystemI):
        dY = -Ya * (Ya + sys.c) + Xa - xpow(Xa, sys.k)
    else:
        dY = -Ya * (Ya + sys.c1 * xpow(Xa, sys.k1)) + 1.0 - xpow(Xa, sys.k2)
    if np.ndim(dX) == 0 and np.ndim(dY) == 0:
        return float(dX), float(dY)
    dX, dY = np.broadcast_arrays(dX, dY)
    return dX, dY


def jacobian(sys: PhaseSystem, X: float, Y: float) -> np.ndarray:
    """2x2 Jacobian of the vector field at (X, Y), X >= 0."""
    X = float(X)
    Y = float(Y)
    if X < 0.0:
        raise DomainError("jacobian requires X >= 0")
    if isinstance(sys, PhaseSystemI):
        dQdX = 1.0 - sys.k * xpow(X, sys.k - 1.0)
        dQdY = -2.0 * Y - sys.c
    else:
        dQdX = 0.0
        if sys.k1 != 0.0:
            dQdX -= sys.c1 * Y * sys.k1 * xpow(X, sys.k1 - 1.0)
        dQdX -= sys.k2 * xpow(X, sys.k2 - 1.0)
        dQdY = -2.0 * Y - sys.c1 * xpow(X, sys.k1)
    return np.array([[sys.gamma * Y, sys.gamma * X], [dQdX, dQdY]], dtype=float)


def _eigenpair(J: np.ndarray) -> tuple[complex, complex]:
    # exact roots of the characteristic polynomial of a 2x2 matrix
    tr = J[0, 0] + J[1, 1]
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    root = cmath.sqrt(complex(tr * tr - 4.0 * det))
    return (complex(tr + root) / 2.0, complex(tr - root) / 2.0)


def _info(sys: PhaseSystem, name: str, x: float, y: float,
          kind: FixedPointKind, degenerate: bool = False) -> FixedPointInfo:
    J = jacobian(sys, x, y)
    return FixedPointInfo(
        name=name,
        location=(x, y),
        jacobian=((J[0, 0], J[0, 1]), (J[1, 0], J[1, 1])),
        eigenvalues=_eigenpair(J),
        kind=kind,
        degenerate=degenerate,
    )


def _classify_p2(sys: PhaseSystem) -> tuple[FixedPointKind, bool]:
    if isinstance(sys, PhaseSystemI):
        speed, det4 = sys.c, 4.0 * sys.gamma * (sys.k - 1.0)
    else:
        speed, det4 = sys.c1, 4.0 * sys.gamma * sys.k2
    disc = speed * speed - det4
    tol = 1e-12 * max(abs(speed * speed), det4, 1.0)
    if speed == 0.0:
        # zero-speed boundary: purely imaginary eigenvalues (center at the
        # linear level); not in the stable node/focus dichotomy
        return FixedPointKind.DEGENERATE, True
    if abs(disc) <= tol:
        # boundary c = c*: reported as StableNode, flagged degenerate
        return FixedPointKind.STABLE_NODE, True
    if disc > 0.0:
        return FixedPointKind.STABLE_NODE, False
    return FixedPointKind.STABLE_FOCUS, False


def axis_equilibria(sys: PhaseSystemII) -> tuple[float, float]:
    """Y values of the two Y-axis equilibria (Y+ > 0 > Y-) of a Case II system.

    On X = 0 the second equation reads -Y(Y + c1*[k1=0]) + 1 = 0, so the
    roots are +-1 when k1 > 0 and (-c1 +- sqrt(c1^2+4))/2 when k1 = 0.
    """
    if sys.k1 > 0.0:
        return 1.0, -1.0
    s = math.sqrt(sys.c1 * sys.c1 + 4.0)
    return (-sys.c1 + s) / 2.0, (-sys.c1 - s) / 2.0


def fixed_points(sys: PhaseSystem) -> list[FixedPointInfo]:
    """Equilibria of the system with linearization and kind.

    Case I: P0 = (0,0) saddle-node (eigenvalues {0, -c}), P1 = (0,-c) saddle,
    P2 = (1,0) stable node iff c^2 >= 4*gamma*(k-1), i.e. iff c >= 2*sqrt(p-q).
    At c = 0, P0 and P1 merge into one fully degenerate point.

    Case II: the two Y-axis equilibria take the P0/P1 roles (the positive-Y
    one repels into X > 0, the negative-Y one is its mirror); both are
    hyperbolic saddles.  P2 = (1,0) is classified exactly as in Case I, with
    discriminant c1^2 - 4*gamma*k2 (same sign as c^2 - 4(p-q)).
    """
    pts: list[FixedPointInfo] = []
    if isinstance(sys, PhaseSystemI):
        if sys.c == 0.0:
            pts.append(_info(sys, "P0", 0.0, 0.0, FixedPointKind.DEGENERATE, True))
        else:
            pts.append(_info(sys, "P0", 0.0, 0.0, FixedPointKind.SADDLE_NODE))
            pts.append(_info(sys, "P1", 0.0, -sys.c, FixedPointKind.SADDLE))
    else:
        y_plus, y_minus = axis_equilibria(sys)
        pts.append(_info(sys, "P0", 0.0, y_plus, FixedPointKind.SADDLE))
        pts.append(_info(sys, "P1", 0.0, y_minus, FixedPointKind.SADDLE))
    kind, degenerate = _classify_p2(sys)
    pts.append(_info(sys, "P2", 1.0, 0.0, kind, degenerate))
    return pts


def dulac_divergence(sys: PhaseSystemI, X, Y=0.0):
    """Divergence of the field weighted by B = X^(2/gamma - 1).

    The closed form is -c * X^(2/gamma - 1): independent of Y and strictly
    negative on X > 0 for c > 0, which rules out closed orbits in the open
    half-plane.  Accepts arrays in X (Y is ignored beyond shape checks).
    """
    if not isinstance(sys, PhaseSystemI):
        raise InvalidParameterError("dulac_divergence applies to Case I systems")
    Xa = np.asarray(X, dtype=float)
    if np.any(Xa <= 0.0):
        raise DomainError("dulac_divergence requires X > 0")
    out = -sys.c * Xa ** (2.0 / sys.gamma - 1.0)
    return out if out.ndim else float(out)


def region_G_residual(sys: PhaseSystemI, mq: float, X):
    """Outward normal flux R(X) = n . V on the line Y = a(1 - X), a = c/(2 gamma).

    R(X) = -X^2 a^2 (m+q-1) + X (a^2 (m+q) + c a + 1) - a^2 - c a - X^k.
    R(1) = 0 identically and R(X) <= 0 on [0,1] whenever c >= 2 sqrt(p-q),
    which confines the connecting orbit to the triangle G.
    """
    if not isinstance(sys, PhaseSystemI):
        raise InvalidParameterError("region_G_residual applies to Case I systems")
    if abs(mq - (sys.gamma + 2.0)) > 1e-9 * max(1.0, abs(mq)):
        raise InvalidParameterError(
            f"mq = {mq!r} inconsistent with gamma = {sys.gamma!r} (mq must equal gamma + 2)"
        )
    Xa = np.asarray(X, dtype=float)
    if np.any(Xa < 0.0):
        raise DomainError("region_G_residual requires X >= 0")
    a = sys.c / (2.0 * sys.gamma)
    out = (
        -(Xa * Xa) * a * a * (mq - 1.0)
        + Xa * (a * a * mq + sys.c * a + 1.0)
        - a * a
        - sys.c * a
        - xpow(Xa, sys.k)
    )
    return out if np.ndim(out) else float(out)


def zero_speed_curve(sys: PhaseSystemI, X):
    """Y^2 along the explicit c = 0 trajectory: 2X/(2+gamma) - 2X^k/(2+gamma k).

    May be negative, meaning the curve does not pass through that X.
    """
    Xa = np.asarray(X, dtype=float)
    if np.any(Xa < 0.0):
        raise DomainError("zero_speed_curve requires X >= 0")
    out = 2.0 * Xa / (2.0 + sys.gamma) - 2.0 * xpow(Xa, sys.k) / (2.0 + sys.gamma * sys.k)
    return out if np.ndim(out) else float(out)


def zero_speed_X0(sys: PhaseSystemI) -> float:
    """X where the c = 0 trajectory recrosses the X axis:
    ((2 + gamma k)/(2 + gamma))^(1/(k-1)) > 1."""
    return ((2.0 + sys.gamma * sys.k) / (2.0 + sys.gamma)) ** (1.0 / (sys.k - 1.0))
