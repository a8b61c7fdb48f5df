"""Numeric tolerance policy.

Every tolerance used as a default anywhere in the package is read from a
:class:`NumericPolicy`.  The active profile is selected by the environment
variable ``GNSLAB_TOL_PROFILE`` (``default`` or ``strict``) at call time.
"""

from __future__ import annotations

import dataclasses
import os

ENV_VAR = "GNSLAB_TOL_PROFILE"


@dataclasses.dataclass(frozen=True)
class NumericPolicy:
    hermiticity: float = 1e-10
    rank: float = 1e-10
    orthonormality: float = 1e-12
    purity: float = 1e-9
    state: float = 1e-10
    orthogonal_ray: float = 1e-10
    minus_one_gap: float = 1e-8
    normalization: float = 1e-8
    chart_cover: float = 1e-6
    link: float = 1e-8

    def as_dict(self):
        return dataclasses.asdict(self)


PROFILES = {
    "default": NumericPolicy(),
    "strict": NumericPolicy(
        hermiticity=1e-12,
        rank=1e-12,
        orthonormality=1e-13,
        purity=1e-11,
        state=1e-12,
    ),
}


def profile_name():
    name = os.environ.get(ENV_VAR, "default").strip().lower() or "default"
    if name not in PROFILES:
        raise ValueError(f"{ENV_VAR}={name!r}; expected one of {sorted(PROFILES)}")
    return name


def current():
    """Return the policy selected by the environment."""
    return PROFILES[profile_name()]
