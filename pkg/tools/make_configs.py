"""Regenerate the shipped example configs (run from the repository root)."""

import json
import math
from pathlib import Path

from scipy.constants import e, h

from kerrline.constants import REDUCED_PHI_0

Z0 = 50.0
# Phase velocity that puts the bare 1.2 cm line with 10 fF ports at 4.95 GHz.
VELOCITY = 119987783.31377363
HALF = 6e-3
LINE = {"c_per_m": 1 / (Z0 * VELOCITY), "l_per_m": Z0 / VELOCITY}
OUT = Path("src/kerrline/configs")


def doc(junction, c_ports, experiment):
    return {
        "resonator": {"half_length_m": HALF, "left": dict(LINE), "right": dict(LINE)},
        "ports": {"c_in_f": c_ports, "c_out_f": c_ports, "z_ext_ohm": 50.0},
        "junction": junction,
        "experiment": experiment,
    }


def squid(ejs, d, cj, pos):
    return {"type": "squid", "ejsigma_hz": ejs, "d": d, "cj_f": cj, "position_m": pos}


def single(ej, cj, pos):
    return {"type": "single", "ej_hz": ej, "cj_f": cj, "position_m": pos}


def reference_points():
    # Lumped current-biased point: resonance at 5 GHz, E_C = 5 MHz, (E_J+E_L)/E_C = 1.25e5, Z_r = 15 ohm.
    omega = 2 * math.pi * 5e9
    z_r = 15.0
    cap, ind = 1 / (omega * z_r), z_r / omega
    ec = 5e6
    cj = e**2 / (2 * h * ec)
    el = REDUCED_PHI_0**2 / (4 * ind) / h
    ej = 1.25e5 * ec - el
    return {
        "current_biased": {"L_H": ind, "C_F": cap, "cj_f": cj, "ej_hz": ej},
        "end_coupled": {"z_r_ohm": 2 * z_r, "ej_over_ec": 100.0},
    }


CAT = squid(622e9, 0.05, 0.0, 0.75 * HALF)
CONFIGS = {
    "fig3_modes": doc(single(50e9, 0.0, 0.0), 10e-15, {"modes": 3, "flux": 0.0}),
    "fig4_kerr_map": doc(single(622e9, 0.0, 0.0), 10e-15, {
        "modes": 2, "grid": 20, "position_range": [0.0, 0.95],
        "ej_values_hz": [1e10, 3e10, 1e11, 3e11, 1e12, 3e12, 1e13]}),
    "fig5_jpc": doc(squid(636e9, 0.0, 0.0, 0.5 * HALF), 10e-15, {
        "modes": 3, "flux": 0.37, "flux_rf": 0.02, "flux_range": [0.0, 0.45], "grid": 46}),
    "fig6_blockade": doc(CAT, 2.5e-15, {"flux_range": [0.0, 0.5], "grid": 51, "samples": 501}),
    "fig7_cat": doc(CAT, 2.5e-15, {"flux_range": [0.3, 0.5], "grid": 41, "fock": 40,
                                   "alphas": [2.0, math.sqrt(2)], "t_ramp_s": 5e-9}),
    "fig8_inline": doc(single(20e9, 5e-15, 0.0), 0.0, {"length_range_m": [5e-5, 1.2e-2], "grid": 25}),
    "fig9_ultrastrong": doc(squid(19e9, 0.05, 5e-15, HALF - 260e-6), 10e-15, {
        "flux_range": [0.0, 0.5], "grid": 51, "reference_points": reference_points()}),
}

if __name__ == "__main__":
    for name, body in CONFIGS.items():
        (OUT / f"{name}.json").write_text(json.dumps(body, indent=2) + "\n")
        print(name)
