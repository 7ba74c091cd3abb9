"""Named model bundles, one per verification scenario.

* ``ks-classic``   simple walk + Rademacher scenery (recurrent lattice case)
* ``transient``    heavy-tail zeta-tail(0.5) walk + Rademacher scenery
* ``nonlattice``   simple walk + Gaussian scenery (interval-type limits)
* ``cp``           the oriented walk at p = 1/3 with Rademacher jumps/speeds
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import UnknownDistributionError
from .oriented import OrientedParams
from .scenery import SceneryModel, scenery_model
from .stable import DistributionSpec, catalog

__all__ = ["Preset", "get_preset", "PRESET_NAMES"]


@dataclass(frozen=True)
class Preset:
    name: str
    step: Optional[DistributionSpec] = None
    scenery: Optional[SceneryModel] = None
    oriented: Optional[OrientedParams] = None


PRESET_NAMES = ("ks-classic", "transient", "nonlattice", "cp")


def get_preset(name: str) -> Preset:
    if name == "ks-classic":
        return Preset(
            name=name,
            step=catalog("rademacher"),
            scenery=scenery_model(catalog("rademacher")),
        )
    if name == "transient":
        return Preset(
            name=name,
            step=catalog("zeta-tail(0.5)"),
            scenery=scenery_model(catalog("rademacher")),
        )
    if name == "nonlattice":
        return Preset(
            name=name,
            step=catalog("rademacher"),
            scenery=scenery_model(catalog("gaussian")),
        )
    if name == "cp":
        return Preset(
            name=name,
            oriented=OrientedParams.build(
                Fraction(1, 3), catalog("rademacher"), catalog("rademacher")
            ),
        )
    raise UnknownDistributionError(f"no preset named {name!r}")
