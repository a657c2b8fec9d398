"""Physical description of a transmission-line resonator with an embedded junction.

Energies are stored as equivalent frequencies E/h in Hz. Flux is expressed in
units of the flux quantum.
"""

import copy
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .constants import josephson_inductance
from .errors import ConfigError


@dataclass(frozen=True)
class LineSegmentSpec:
    c_per_m: float
    l_per_m: float

    @property
    def impedance(self):
        return math.sqrt(self.l_per_m / self.c_per_m)

    @property
    def velocity(self):
        return 1.0 / math.sqrt(self.l_per_m * self.c_per_m)

    @classmethod
    def from_impedance_velocity(cls, impedance, velocity):
        return cls(c_per_m=1.0 / (impedance * velocity), l_per_m=impedance / velocity)


@dataclass(frozen=True)
class PortSpec:
    c_in: float
    c_out: float
    z_ext: float = 50.0


@dataclass(frozen=True)
class JunctionSpec:
    """Single junction, symmetric/asymmetric SQUID, or a plain short (``kind="none"``)."""

    kind: str
    ej_hz: float = math.inf
    ejsigma_hz: float = 0.0
    asymmetry: float = 0.0
    cj: float = 0.0

    @classmethod
    def single(cls, ej_hz, cj=0.0):
        return cls(kind="single", ej_hz=ej_hz, cj=cj)

    @classmethod
    def squid(cls, ejsigma_hz, asymmetry=0.0, cj=0.0):
        return cls(kind="squid", ejsigma_hz=ejsigma_hz, asymmetry=asymmetry, cj=cj)

    @classmethod
    def short(cls):
        return cls(kind="none")

    @property
    def is_squid(self):
        return self.kind == "squid"

    @property
    def is_short(self):
        return self.kind == "none"


@dataclass(frozen=True)
class CircuitSpec:
    half_length: float
    junction_position: float
    left: LineSegmentSpec
    right: LineSegmentSpec
    ports: PortSpec
    junction: JunctionSpec

    def __post_init__(self):
        validate(self)

    @property
    def total_capacitance(self):
        """C_Sigma: line plus port plus junction capacitance."""
        xl = self.junction_position + self.half_length
        xr = self.half_length - self.junction_position
        return (self.left.c_per_m * xl + self.right.c_per_m * xr
                + self.ports.c_in + self.ports.c_out + self.junction.cj)

    @property
    def distance_to_right_end(self):
        return self.half_length - self.junction_position

    def with_junction(self, **changes):
        return replace(self, junction=replace(self.junction, **changes))

    def with_ports(self, **changes):
        return replace(self, ports=replace(self.ports, **changes))

    def without_junction(self):
        return replace(self, junction=JunctionSpec.short())

    def scaled_length(self, half_length):
        """Same circuit with a new half length; the junction keeps its relative position."""
        frac = self.junction_position / self.half_length
        return replace(self, half_length=half_length, junction_position=frac * half_length)


def effective_josephson_energy(junction, flux):
    """Flux-tuned Josephson energy (Hz) of a SQUID threaded by ``flux`` (units of Phi_0).

    ``E_JSigma |cos(pi f)| sqrt(1 + d^2 tan^2(pi f))``, written in the equivalent
    form ``E_JSigma sqrt(cos^2 + d^2 sin^2)`` so that f = 1/2 is regular.
    The gauge offset ``arctan(d tan(pi f))`` is dropped.
    """
    if not junction.is_squid:
        return junction.ej_hz
    x = math.pi * flux
    d = junction.asymmetry
    return junction.ejsigma_hz * math.sqrt(math.cos(x) ** 2 + (d * math.sin(x)) ** 2)


def gauge_phase(junction, flux):
    """Phase offset delta_0 of the SQUID potential (dropped downstream)."""
    if not junction.is_squid:
        return 0.0
    return math.atan2(junction.asymmetry * math.sin(math.pi * flux), math.cos(math.pi * flux))


def inverse_josephson_inductance(ej_hz):
    if math.isinf(ej_hz):
        return math.inf
    return 1.0 / josephson_inductance(ej_hz)


def validate(spec):
    def positive(path, value):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ConfigError(path, f"must be a positive finite number, got {value!r}")

    def nonneg(path, value):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
            raise ConfigError(path, f"must be a non-negative finite number, got {value!r}")

    positive("resonator.half_length_m", spec.half_length)
    for side, seg in (("left", spec.left), ("right", spec.right)):
        positive(f"resonator.{side}.c_per_m", seg.c_per_m)
        positive(f"resonator.{side}.l_per_m", seg.l_per_m)
    nonneg("ports.c_in_f", spec.ports.c_in)
    nonneg("ports.c_out_f", spec.ports.c_out)
    positive("ports.z_ext_ohm", spec.ports.z_ext)
    j = spec.junction
    if j.kind not in ("single", "squid", "none"):
        raise ConfigError("junction.type", f"unknown junction type {j.kind!r}")
    if not (-spec.half_length < spec.junction_position < spec.half_length):
        raise ConfigError(
            "junction.position_m",
            f"{spec.junction_position!r} outside the resonator (-{spec.half_length}, {spec.half_length})",
        )
    nonneg("junction.cj_f", j.cj)
    if j.kind == "single":
        positive("junction.ej_hz", j.ej_hz)
    elif j.kind == "squid":
        positive("junction.ejsigma_hz", j.ejsigma_hz)
        if not (isinstance(j.asymmetry, (int, float)) and 0.0 <= j.asymmetry <= 1.0):
            raise ConfigError("junction.d", f"asymmetry must lie in [0, 1], got {j.asymmetry!r}")


# --- config documents -------------------------------------------------------

_SCHEMA = {
    "resonator": {
        "half_length_m": float,
        "left": {"c_per_m": float, "l_per_m": float},
        "right": {"c_per_m": float, "l_per_m": float},
    },
    "ports": {"c_in_f": float, "c_out_f": float, "z_ext_ohm": float},
}
_JUNCTION_KEYS = {
    "single": {"type", "ej_hz", "cj_f", "position_m"},
    "squid": {"type", "ejsigma_hz", "d", "cj_f", "position_m"},
    "none": {"type", "position_m"},
}
_TOP_KEYS = {"resonator", "ports", "junction", "experiment"}


def _check_tree(doc, schema, path):
    if not isinstance(doc, dict):
        raise ConfigError(path or "<root>", "expected an object")
    extra = set(doc) - set(schema)
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}".lstrip("."), "unknown key")
    for key, sub in schema.items():
        where = f"{path}.{key}".lstrip(".")
        if key not in doc:
            raise ConfigError(where, "missing key")
        if isinstance(sub, dict):
            _check_tree(doc[key], sub, where)
        else:
            _number(doc[key], where)


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(where, f"expected a number, got {value!r}")
    return float(value)


def load_and_validate_spec(document):
    """Build a validated :class:`CircuitSpec` from a config mapping, JSON text or path."""
    if isinstance(document, (str, Path)) and not str(document).lstrip().startswith("{"):
        document = json.loads(Path(document).read_text())
    elif isinstance(document, str):
        document = json.loads(document)
    if not isinstance(document, dict):
        raise ConfigError("<root>", "expected an object")
    extra = set(document) - _TOP_KEYS
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown key")
    _check_tree({k: document.get(k) for k in _SCHEMA if k in document},
                {k: v for k, v in _SCHEMA.items()}, "")
    jdoc = document.get("junction")
    if jdoc is None:
        raise ConfigError("junction", "missing key")
    if not isinstance(jdoc, dict):
        raise ConfigError("junction", "expected an object")
    kind = jdoc.get("type")
    if kind not in _JUNCTION_KEYS:
        raise ConfigError("junction.type", f"must be one of single, squid, none; got {kind!r}")
    allowed = _JUNCTION_KEYS[kind]
    extra = set(jdoc) - allowed
    if extra:
        raise ConfigError(f"junction.{sorted(extra)[0]}", "unknown key")
    required = allowed - ({"position_m"} if kind == "none" else set())
    missing = required - set(jdoc)
    if missing:
        raise ConfigError(f"junction.{sorted(missing)[0]}", "missing key")
    for key in allowed - {"type"}:
        if key in jdoc:
            _number(jdoc[key], f"junction.{key}")

    res = document["resonator"]
    ports = document["ports"]
    if kind == "single":
        junction = JunctionSpec.single(float(jdoc["ej_hz"]), cj=float(jdoc["cj_f"]))
    elif kind == "squid":
        junction = JunctionSpec(kind="squid", ejsigma_hz=float(jdoc["ejsigma_hz"]),
                                asymmetry=float(jdoc["d"]), cj=float(jdoc["cj_f"]))
    else:
        junction = JunctionSpec.short()
    return CircuitSpec(
        half_length=float(res["half_length_m"]),
        junction_position=float(jdoc.get("position_m", 0.0)),
        left=LineSegmentSpec(float(res["left"]["c_per_m"]), float(res["left"]["l_per_m"])),
        right=LineSegmentSpec(float(res["right"]["c_per_m"]), float(res["right"]["l_per_m"])),
        ports=PortSpec(float(ports["c_in_f"]), float(ports["c_out_f"]), float(ports["z_ext_ohm"])),
        junction=junction,
    )


def spec_to_document(spec):
    j = spec.junction
    if j.kind == "single":
        jdoc = {"type": "single", "ej_hz": j.ej_hz, "cj_f": j.cj, "position_m": spec.junction_position}
    elif j.kind == "squid":
        jdoc = {"type": "squid", "ejsigma_hz": j.ejsigma_hz, "d": j.asymmetry, "cj_f": j.cj,
                "position_m": spec.junction_position}
    else:
        jdoc = {"type": "none", "position_m": spec.junction_position}
    return {
        "resonator": {
            "half_length_m": spec.half_length,
            "left": {"c_per_m": spec.left.c_per_m, "l_per_m": spec.left.l_per_m},
            "right": {"c_per_m": spec.right.c_per_m, "l_per_m": spec.right.l_per_m},
        },
        "ports": {"c_in_f": spec.ports.c_in, "c_out_f": spec.ports.c_out, "z_ext_ohm": spec.ports.z_ext},
        "junction": jdoc,
    }


def apply_overrides(document, overrides):
    """Return a copy of ``document`` with ``key.path=value`` overrides applied.

    Values are parsed as JSON (numbers, lists, strings) with a bare-string fallback.
    Overrides may only replace keys that already exist, except under ``experiment``.
    """
    doc = copy.deepcopy(document)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must have the form key.path=value")
        path, raw = item.split("=", 1)
        keys = path.strip().split(".")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = doc
        for i, key in enumerate(keys[:-1]):
            if key not in node:
                if keys[0] == "experiment":
                    node[key] = {}
                else:
                    raise ConfigError(".".join(keys[: i + 1]), "unknown key")
            node = node[key]
            if not isinstance(node, dict):
                raise ConfigError(".".join(keys[: i + 1]), "not an object")
        leaf = keys[-1]
        if keys[0] != "experiment" and leaf not in node:
            if not (len(keys) == 2 and keys[0] == "junction"):
                raise ConfigError(path, "unknown key")
        old = node.get(leaf)
        if isinstance(old, (int, float)) and not isinstance(old, bool):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(path, f"expected a number, got {raw!r}")
            value = float(value)
        node[leaf] = value
    return doc
