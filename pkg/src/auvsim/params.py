"""Vehicle parameter file parsing.

Flat key/value UTF-8 text: ``key = v1, v2, ...`` with ``#`` comments.
Matrices are row-major, comma-separated. The shipped ``default.params``
encodes the 4.4 m / 370 kg three-thruster survey vehicle configuration.
"""

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .actuation import AllocationMatrix, ThrusterParams, validate_surge_budget
from .dynamics import VehicleParams

_SCALARS = {
    "mass", "length", "hull_diameter", "weight", "buoyancy",
    "max_thrust", "dead_zone", "time_constant", "curve_exponent", "max_rpm",
    "lakebed_depth", "supply_voltage", "cm_reference",
}
_VECTORS = {
    "inertia": 9, "added_mass": 36, "d1": 6, "d2": 6, "cg": 3, "cb": 3,
}
# allocation length depends on the thruster count, validated separately
_KNOWN = _SCALARS | set(_VECTORS) | {"allocation"}

_REQUIRED = (
    set(_VECTORS) | {"mass", "weight", "buoyancy", "allocation"}
)


class ParameterFileError(Exception):
    pass


@dataclass
class ParameterSet:
    vehicle: VehicleParams
    thruster: ThrusterParams
    allocation: AllocationMatrix
    lakebed_depth: float
    supply_voltage: float
    cm_reference: float | None
    source_hash: str


def _parse_lines(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterFileError("line %d: expected 'key = value'" % lineno)
        key, _, rest = line.partition("=")
        key = key.strip()
        if key not in _KNOWN:
            raise ParameterFileError("line %d: unknown key %r" % (lineno, key))
        if key in values:
            raise ParameterFileError("line %d: duplicate key %r" % (lineno, key))
        try:
            nums = [float(tok) for tok in rest.split(",")]
        except ValueError as exc:
            raise ParameterFileError("line %d: bad number (%s)" % (lineno, exc))
        values[key] = nums
    return values


def parse_params(text: str, source_hash: str = "") -> ParameterSet:
    values = _parse_lines(text)
    missing = _REQUIRED - set(values)
    if missing:
        raise ParameterFileError("missing keys: %s" % ", ".join(sorted(missing)))

    def scalar(key, default=None):
        if key not in values:
            return default
        if len(values[key]) != 1:
            raise ParameterFileError("%s must be a single value" % key)
        return values[key][0]

    def vector(key):
        n = _VECTORS[key]
        if len(values[key]) != n:
            raise ParameterFileError(
                "%s must have %d comma-separated values" % (key, n)
            )
        return np.array(values[key])

    alloc_flat = values["allocation"]
    if len(alloc_flat) % 6 != 0:
        raise ParameterFileError("allocation must be 6 x n, row-major")
    allocation = AllocationMatrix(np.array(alloc_flat).reshape(6, -1))

    vehicle = VehicleParams(
        mass=scalar("mass"),
        inertia=vector("inertia").reshape(3, 3),
        added_mass=vector("added_mass").reshape(6, 6),
        d1=vector("d1"),
        d2=vector("d2"),
        weight=scalar("weight"),
        buoyancy=scalar("buoyancy"),
        cg=vector("cg"),
        cb=vector("cb"),
        length=scalar("length", 0.0),
        hull_diameter=scalar("hull_diameter", 0.0),
    )
    thruster = ThrusterParams(
        max_thrust=scalar("max_thrust", 300.0),
        dead_zone=scalar("dead_zone", 0.05),
        time_constant=scalar("time_constant", 0.2),
        curve_exponent=scalar("curve_exponent", 2.0),
        max_rpm=scalar("max_rpm", 1500.0),
    )
    validate_surge_budget(allocation, thruster.max_thrust)

    return ParameterSet(
        vehicle=vehicle,
        thruster=thruster,
        allocation=allocation,
        lakebed_depth=scalar("lakebed_depth", 50.0),
        supply_voltage=scalar("supply_voltage", 150.0),
        cm_reference=scalar("cm_reference"),
        source_hash=source_hash,
    )


def load_params(path) -> ParameterSet:
    data = Path(path).read_bytes()
    return parse_params(
        data.decode("utf-8"), source_hash=hashlib.sha256(data).hexdigest()
    )


def default_params_text() -> str:
    return (
        resources.files("auvsim").joinpath("data/default.params").read_text("utf-8")
    )


def load_default_params() -> ParameterSet:
    text = default_params_text()
    return parse_params(
        text, source_hash=hashlib.sha256(text.encode("utf-8")).hexdigest()
    )
