"""Physical constants and the small unit system used throughout maglat.

Energies are carried internally as floats in micro-electronvolts (ueV);
lengths, masses and fields are SI.  Frequencies given as "GHz" are angular
(1 GHz == 1e9 rad/s) so that 380 GHz corresponds to 250 ueV via hbar.  Prefix
a frequency unit with ``2pi*`` to mean cycles per second instead.
"""

from __future__ import annotations

import math
import re

# CODATA 2018 exact / recommended values (SI)
H_PLANCK = 6.62607015e-34
HBAR = H_PLANCK / (2 * math.pi)
E_CHARGE = 1.602176634e-19
K_BOLTZMANN = 1.380649e-23
M_ELECTRON = 9.1093837015e-31
MU_BOHR = 9.2740100783e-24
MU_0 = 1.25663706212e-6
EPS_0 = 8.8541878128e-12
C_LIGHT = 299792458.0

UEV = 1e-6 * E_CHARGE  # joules per micro-electronvolt

# convenience values in working units (ueV, T, K)
MU_B_UEV_PER_T = MU_BOHR / UEV
K_B_UEV_PER_K = K_BOLTZMANN / UEV
HBAR_UEV_S = HBAR / UEV


class UnitError(ValueError):
    """Raised for unknown units or dimensionally incompatible conversions."""


# (dimension, factor to the SI-like base of that dimension)
# energy base: joule; length: metre; field: tesla; mass: kg; time: s
_UNITS: dict[str, tuple[str, float]] = {
    "J": ("energy", 1.0),
    "eV": ("energy", E_CHARGE),
    "meV": ("energy", 1e-3 * E_CHARGE),
    "ueV": ("energy", UEV),
    "μeV": ("energy", UEV),
    "µeV": ("energy", UEV),
    "neV": ("energy", 1e-9 * E_CHARGE),
    "rad/s": ("energy", HBAR),
    "Hz": ("energy", HBAR),
    "kHz": ("energy", HBAR * 1e3),
    "MHz": ("energy", HBAR * 1e6),
    "GHz": ("energy", HBAR * 1e9),
    "THz": ("energy", HBAR * 1e12),
    "K": ("energy", K_BOLTZMANN),
    "mK": ("energy", 1e-3 * K_BOLTZMANN),
    "m": ("length", 1.0),
    "mm": ("length", 1e-3),
    "um": ("length", 1e-6),
    "μm": ("length", 1e-6),
    "µm": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "T": ("field", 1.0),
    "mT": ("field", 1e-3),
    "uT": ("field", 1e-6),
    "μT": ("field", 1e-6),
    "µT": ("field", 1e-6),
    "kg": ("mass", 1.0),
    "m0": ("mass", M_ELECTRON),
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "ns": ("time", 1e-9),
    "ps": ("time", 1e-12),
    "m/s": ("velocity", 1.0),
    "km/s": ("velocity", 1e3),
    "1": ("dimensionless", 1.0),
    "": ("dimensionless", 1.0),
}

_FREQUENCY_UNITS = {"Hz", "kHz", "MHz", "GHz", "THz"}


def _lookup(unit: str) -> tuple[str, float]:
    u = unit.strip()
    scale = 1.0
    for prefix in ("2pi*", "2π*", "2pi ", "2π "):
        if u.startswith(prefix):
            u = u[len(prefix):].strip()
            if u not in _FREQUENCY_UNITS:
                raise UnitError(f"2pi prefix only applies to frequency units, got {unit!r}")
            scale = 2.0 * math.pi
            break
    try:
        dim, factor = _UNITS[u]
    except KeyError:
        raise UnitError(f"unknown unit {unit!r}") from None
    return dim, factor * scale


def dimension(unit: str) -> str:
    """Return the dimension name of ``unit``."""
    return _lookup(unit)[0]


def convert(value, from_unit: str, to_unit: str):
    """Convert ``value`` between two units of the same dimension.

    Works on scalars and numpy arrays alike.

    >>> round(convert(380, "GHz", "ueV"), 1)
    250.1
    """
    d_from, f_from = _lookup(from_unit)
    d_to, f_to = _lookup(to_unit)
    if d_from != d_to:
        raise UnitError(f"cannot convert {from_unit!r} ({d_from}) to {to_unit!r} ({d_to})")
    if f_from == f_to:
        return value
    return value * (f_from / f_to)


_QTY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def parse_quantity(text, to_unit: str) -> float:
    """Parse ``"380 GHz"`` style strings (or bare numbers) into ``to_unit``.

    A bare number is taken to already be in ``to_unit``.
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    if not isinstance(text, str):
        raise UnitError(f"expected a number or quantity string, got {text!r}")
    m = _QTY_RE.match(text)
    if m is None:
        raise UnitError(f"malformed quantity {text!r}")
    value = float(m.group(1))
    unit = m.group(2)
    if not unit:
        return value
    return float(convert(value, unit, to_unit))


def hbar_omega_ueV(omega_rad_s):
    """Energy hbar*omega in ueV for an angular frequency in rad/s."""
    return omega_rad_s * HBAR_UEV_S


def omega_from_ueV(energy_ueV):
    """Angular frequency (rad/s) for an energy in ueV."""
    return energy_ueV / HBAR_UEV_S
