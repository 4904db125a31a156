"""Energy transforms applied to distances.

Every potential maps 0 to 0 and is non-decreasing, so the energy of a sample
is ``psi(distance to nearest center)``. All functions are vectorised over
numpy arrays and also accept python scalars.
"""

from __future__ import annotations

import numpy as np

POTENTIALS = ("quadratic", "identity", "exponential", "logarithmic", "step")


class Potential:
    """A monotone energy function ``psi`` with ``psi(0) == 0``.

    Parameters
    ----------
    kind : {'quadratic', 'identity', 'exponential', 'logarithmic', 'step'}
        ``quadratic`` gives K-means energies, ``step`` is 0 up to and including
        ``radius`` and 1 beyond it.
    radius : float, default=0.05
        Only used by ``step``.
    """

    def __init__(self, kind: str = "quadratic", radius: float = 0.05):
        if kind == "linear":
            kind = "identity"
        if kind not in POTENTIALS:
            raise ValueError(f"unknown potential {kind!r}; choose from {POTENTIALS}")
        if kind == "step" and not radius >= 0:
            raise ValueError("step radius must be non-negative")
        self.kind = kind
        self.radius = float(radius)

    def __call__(self, v):
        v = np.asarray(v, dtype=np.float64)
        if self.kind == "quadratic":
            out = v * v
        elif self.kind == "identity":
            out = v + 0.0
        elif self.kind == "exponential":
            out = np.expm1(v)
        elif self.kind == "logarithmic":
            out = np.log1p(v)
        else:
            out = (v > self.radius).astype(np.float64)
        return out if out.ndim else float(out)

    def __repr__(self):
        if self.kind == "step":
            return f"Potential('step', radius={self.radius})"
        return f"Potential({self.kind!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Potential)
            and self.kind == other.kind
            and (self.kind != "step" or self.radius == other.radius)
        )

    def __hash__(self):
        return hash((self.kind, self.radius if self.kind == "step" else None))

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "step":
            d["radius"] = self.radius
        return d


def get_potential(potential) -> Potential:
    if isinstance(potential, Potential):
        return potential
    if isinstance(potential, dict):
        return Potential(**potential)
    return Potential(potential)


def apply_potential(v, potential="quadratic"):
    """Energy of distance ``v`` (scalar or array) under ``potential``."""
    if np.any(np.asarray(v) < 0):
        raise ValueError("distances must be non-negative")
    return get_potential(potential)(v)
