"""Physical constants (CODATA 2018 via scipy.constants)."""

import hashlib
import json

from scipy import constants as _sc

E_CHARGE = _sc.e
H_PLANCK = _sc.h
HBAR = _sc.hbar
EPSILON_0 = _sc.epsilon_0
C_LIGHT = _sc.c
PHI_0 = H_PLANCK / (2 * E_CHARGE)
REDUCED_PHI_0 = PHI_0 / (2 * _sc.pi)
R_K = H_PLANCK / E_CHARGE**2
Z_VACUUM = 1 / (EPSILON_0 * C_LIGHT)
ALPHA_FS = Z_VACUUM / (2 * R_K)

TABLE = {
    "e": E_CHARGE,
    "h": H_PLANCK,
    "hbar": HBAR,
    "epsilon_0": EPSILON_0,
    "c": C_LIGHT,
    "phi_0": PHI_0,
    "r_k": R_K,
    "z_vac": Z_VACUUM,
    "alpha_fs": ALPHA_FS,
}


def table_hash():
    blob = json.dumps({k: repr(v) for k, v in TABLE.items()}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def josephson_inductance(ej_hz):
    """Linear inductance (H) of a junction with Josephson energy ``ej_hz`` (E/h)."""
    return REDUCED_PHI_0**2 / (H_PLANCK * ej_hz)
