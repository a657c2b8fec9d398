"""Command-line front end: ``kerrline <subcommand> --config CFG --out DIR``.

Every subcommand writes CSV tables and a ``manifest.json`` into ``--out``.
Outputs depend only on the inputs and the tool version, so repeated runs are
byte-identical. Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import (JunctionSpec, apply_overrides, effective_josephson_energy,
                      inverse_josephson_inductance, load_and_validate_spec)
from .constants import table_hash
from .errors import ConfigError, KerrlineError, NumericalError
from .modes import find_modes, mode_properties
from .nonlinear import analyze, pump_amplitudes, self_kerr

TWO_PI = 2 * math.pi
SUBCOMMANDS = ("validate", "spectrum", "sweep-flux", "sweep-position", "sweep-length", "jpc",
               "blockade", "cat", "ultrastrong")

DEFAULTS = {
    "flux": 0.0,
    "modes": 3,
    "flux_range": [0.0, 0.5],
    "grid": 51,
    "position_range": [0.0, 0.95],
    "ej_values_hz": None,
    "flux_rf": 0.02,
    "length_range_m": [5e-5, 1.2e-2],
    "envelope_points": 401,
    "epsilon_hz": 2e6,
    "blockade_cases": [
        {"label": "I", "kerr_to_kappa": 0.04, "fock": 150, "t_end_s": 2.5e-6},
        {"label": "II", "kerr_to_kappa": 200.0, "fock": 15, "t_end_s": 1e-6},
    ],
    "samples": 401,
    "alphas": [2.0, 1.4142135623730951],
    "flux_start": 0.3,
    "flux_peak": 0.5,
    "t_ramp_s": 5e-9,
    "fock": 40,
    "wigner_extent": 5.0,
    "wigner_points": 101,
    "reference_points": None,
}


# --- shared helpers ---------------------------------------------------------

def shipped_configs():
    base = resources.files("kerrline") / "configs"
    return sorted(p.name[:-5] for p in base.iterdir() if p.name.endswith(".json"))


def resolve_config(name):
    path = Path(name)
    if path.exists():
        return path.read_text()
    base = resources.files("kerrline") / "configs"
    candidate = base / (name if name.endswith(".json") else name + ".json")
    if candidate.is_file():
        return candidate.read_text()
    raise ConfigError("--config", f"no such file or shipped config: {name}")


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else repr(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_manifest(out, context, results):
    manifest = {
        "tool": "kerrline",
        "version": __version__,
        "subcommand": context.command,
        "config_sha256": context.config_hash,
        "constants_sha256": table_hash(),
        "parameters": context.parameters(),
        "results": results,
    }
    (out / "manifest.json").write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")


class Context:
    def __init__(self, args, document, spec):
        self.command = args.command
        self.args = args
        self.document = document
        self.spec = spec
        self.config_hash = hashlib.sha256(
            json.dumps(document, sort_keys=True).encode()).hexdigest()
        exp = dict(DEFAULTS)
        exp.update(document.get("experiment", {}))
        if args.modes is not None:
            exp["modes"] = args.modes
        if args.grid is not None:
            exp["grid"] = args.grid
        if args.fock is not None:
            exp["fock"] = args.fock
            for case in exp["blockade_cases"]:
                case["fock"] = args.fock
        self.experiment = exp
        self.threads = args.threads or int(os.environ.get("KERRLINE_THREADS", "1") or 1)

    def parameters(self):
        used = {k: self.experiment[k] for k in sorted(self.experiment)}
        return {"config": self.document, "experiment": used}

    def __getitem__(self, key):
        return self.experiment[key]

    @contextmanager
    def executor(self):
        if self.threads <= 1:
            yield None
        else:
            with ProcessPoolExecutor(max_workers=self.threads) as pool:
                yield pool


def _map(ctx, pool, fn, *iterables):
    return list(map(fn, *iterables) if pool is None else pool.map(fn, *iterables))


def mode_row_headers(count):
    cols = []
    for m in range(1, count + 1):
        cols += [f"f{m}_GHz", f"K{m}{m}_MHz", f"eta_l{m}", f"kappa{m}_MHz"]
    return cols


def mode_row_values(point, count):
    vals = []
    props = {p.index: p for p in point.props}
    for m in range(1, count + 1):
        p = props[m]
        kerr = 0.0 if p.junction_blind else self_kerr(p) / TWO_PI / 1e6
        eta = 0.0 if p.junction_blind else p.eta_l
        vals += [p.omega / TWO_PI / 1e9, kerr, eta, point.kappa[m - 1] / TWO_PI / 1e6]
    return vals


# --- subcommands --------------------------------------------------------------

def cmd_validate(ctx, out):
    spec = ctx.spec
    flux = ctx["flux"]
    ej = effective_josephson_energy(spec.junction, flux)
    inv = inverse_josephson_inductance(ej)
    report = {
        "Z0_left_ohm": spec.left.impedance,
        "Z0_right_ohm": spec.right.impedance,
        "v_left_m_s": spec.left.velocity,
        "v_right_m_s": spec.right.velocity,
        "C_sigma_F": spec.total_capacitance,
        "E_J_Hz": ej,
        "L_J_H": 0.0 if math.isinf(inv) else 1.0 / inv,
        "flux": flux,
    }
    print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
    return report


def cmd_spectrum(ctx, out):
    count = ctx["modes"]
    point = analyze(ctx.spec, ctx["flux"], count)
    basis = point.basis
    rows = []
    for rec, p in zip(basis.to_records(), point.props):
        rows.append([rec["m"], rec["k_per_m"], rec["omega_rad_s"] / TWO_PI / 1e9, rec["A"], rec["B"],
                     rec["phi_i"], rec["phi_o"], rec["delta_u"], p.junction_blind])
    write_csv(out / "modes.csv", ["m", "k_per_m", "f_GHz", "A", "B", "phi_i", "phi_o",
                                  "delta_u", "junction_blind"], rows)
    l = ctx.spec.half_length
    x = np.linspace(-l, l, ctx["envelope_points"])
    xj = ctx.spec.junction_position
    x = np.sort(np.concatenate([x, [xj, np.nextafter(xj, np.inf)]]))
    env = [mode(x) for mode in basis.modes]
    write_csv(out / "envelopes.csv", ["x_m"] + [f"u{m}" for m in range(1, count + 1)],
              [[xi] + [e[i] for e in env] for i, xi in enumerate(x)])
    prop_rows = []
    for p, kappa in zip(point.props, point.kappa):
        blind = p.junction_blind
        prop_rows.append([
            p.index, p.omega / TWO_PI / 1e9, p.delta_u, p.resonator_capacitance,
            p.resonator_inductance, p.mode_inductance,
            "" if blind else p.rescaled_capacitance, "" if blind else p.rescaled_inductance,
            "" if blind else p.eta_c, "" if blind else p.eta_l,
            "" if blind else p.charging_energy_hz / 1e6,
            "" if blind else self_kerr(p) / TWO_PI / 1e6, kappa / TWO_PI / 1e6])
    write_csv(out / "properties.csv",
              ["m", "f_GHz", "delta_u", "C_res_F", "L_res_H", "L_mode_H", "C_prime_F", "L_prime_H",
               "eta_c", "eta_l", "E_C_prime_MHz", "K_MHz", "kappa_MHz"], prop_rows)
    kinked = [p.index for p in point.props if not p.junction_blind]
    return {"frequencies_GHz": list(basis.frequencies / TWO_PI / 1e9), "kinked_modes": kinked,
            "C_sigma_F": basis.total_capacitance, "E_J_Hz": basis.ej_hz}


def cmd_sweep_flux(ctx, out):
    count = ctx["modes"]
    lo, hi = ctx["flux_range"]
    fluxes = [float(f) for f in np.linspace(lo, hi, ctx["grid"])]
    with ctx.executor() as pool:
        points = _map(ctx, pool, analyze, [ctx.spec] * len(fluxes), fluxes, [count] * len(fluxes))
    pump = ctx.spec.junction.is_squid and ctx["flux_rf"]
    pairs = [(m, n) for m in range(1, count + 1) for n in range(m + 1, count + 1)]
    triples = [(l, m, n) for l in range(1, count + 1) for m, n in pairs]
    header = ["flux", "E_J_GHz"] + mode_row_headers(count)
    header += [f"K{m}{n}_MHz" for m, n in pairs]
    header += [f"zeta{l}{m}{n}_MHz" for l, m, n in triples]
    if pump:
        header += [f"g{m}_MHz" for m in range(1, count + 1)]
        header += [f"g{m}{n}_MHz" for m, n in pairs]
    rows = []
    for f, pt in zip(fluxes, points):
        row = [f, pt.ej_hz / 1e9] + mode_row_values(pt, count)
        nl = pt.couplings
        coupled = () if nl is None else nl.modes
        row += [nl.cross_kerr(m, n) / TWO_PI / 1e6 if m in coupled and n in coupled else 0.0
                for m, n in pairs]
        row += [nl.beam_splitter(l, m, n) / TWO_PI / 1e6
                if {l, m, n} <= set(coupled) else 0.0 for l, m, n in triples]
        if pump:
            g = pump_amplitudes(ctx.spec, pt.basis, pt.props, f, ctx["flux_rf"])
            row += [g.g(m) / TWO_PI / 1e6 if m in g.modes else 0.0 for m in range(1, count + 1)]
            for m, n in pairs:
                row.append(g.g(m, n) / TWO_PI / 1e6 if m in g.modes and n in g.modes else 0.0)
        rows.append(row)
    write_csv(out / "sweep_flux.csv", header, rows)
    return {"points": len(rows)}


def _position_point(spec, frac, ej, flux, count):
    spec = replace(spec, junction_position=frac * spec.half_length)
    if ej is not None:
        spec = replace(spec, junction=JunctionSpec.single(ej, cj=spec.junction.cj))
    return analyze(spec, flux, count)


def cmd_sweep_position(ctx, out):
    count = ctx["modes"]
    lo, hi = ctx["position_range"]
    fracs = [float(f) for f in np.linspace(lo, hi, ctx["grid"])]
    ejs = ctx["ej_values_hz"] or [None]
    jobs = [(fr, ej) for ej in ejs for fr in fracs]
    with ctx.executor() as pool:
        points = _map(ctx, pool, _position_point, [ctx.spec] * len(jobs), [j[0] for j in jobs],
                      [j[1] for j in jobs], [ctx["flux"]] * len(jobs), [count] * len(jobs))
    rows = []
    for (fr, ej), pt in zip(jobs, points):
        rows.append([fr, pt.ej_hz / 1e9] + mode_row_values(pt, count))
    write_csv(out / "sweep_position.csv", ["x_J_over_l", "E_J_GHz"] + mode_row_headers(count), rows)
    return {"points": len(rows)}


def cmd_sweep_length(ctx, out):
    from .effective import length_sweep

    lo, hi = ctx["length_range_m"]
    lengths = np.geomspace(hi, lo, ctx["grid"])
    with ctx.executor() as pool:
        points = length_sweep(ctx.spec, lengths, ctx["flux"], executor=pool)
    rows = [[p.total_length, p.omega_1 / TWO_PI / 1e9, p.omega_p / TWO_PI / 1e9, p.frequency_ratio,
             p.kerr_11 / TWO_PI / 1e6, p.ec_transmon_hz / 1e6, p.kerr_ratio, p.eta_l1]
            for p in points]
    write_csv(out / "sweep_length.csv",
              ["two_l_m", "f1_GHz", "f_p_GHz", "omega1_over_omega_p", "K11_MHz", "E_CT_MHz",
               "K11_over_E_CT", "eta_l1"], rows)
    last = points[-1]
    return {"shortest_length_m": last.total_length, "omega1_over_omega_p": last.frequency_ratio,
            "K11_over_E_CT": last.kerr_ratio}


def cmd_jpc(ctx, out):
    from .nonlinear import nonlinear_couplings

    count = ctx["modes"]
    flux = ctx["flux"]
    basis = find_modes(ctx.spec, flux, count=count)
    props = mode_properties(basis)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        nl = nonlinear_couplings(props)
    pumps = pump_amplitudes(ctx.spec, basis, props, flux, ctx["flux_rf"])
    idx = nl.modes
    write_csv(out / "jpc_modes.csv", ["m", "f_GHz", "f_shifted_GHz", "K_mm_MHz"],
              [[m, nl.omega[i] / TWO_PI / 1e9, nl.shifted_omega[i] / TWO_PI / 1e9,
                nl.kerr[i, i] / TWO_PI / 1e6] for i, m in enumerate(idx)])
    pair_rows = []
    for i, m in enumerate(idx):
        for j in range(i + 1, len(idx)):
            n = idx[j]
            pair_rows.append([m, n, pumps.g(m, n) / TWO_PI / 1e6, nl.kerr[i, j] / TWO_PI / 1e6])
    write_csv(out / "jpc_couplings.csv", ["m", "n", "g_mn_MHz", "K_mn_MHz"], pair_rows)
    w = nl.omega
    det_rows = []
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            for c in range(b + 1, len(idx)):
                det_rows.append([f"(w{idx[c]}-w{idx[b]})-(w{idx[b]}-w{idx[a]})",
                                 ((w[c] - w[b]) - (w[b] - w[a])) / TWO_PI / 1e6])
            det_rows.append([f"w{idx[b]}-2w{idx[a]}", (w[b] - 2 * w[a]) / TWO_PI / 1e6])
    write_csv(out / "jpc_detunings.csv", ["process", "detuning_MHz"], det_rows)
    return {
        "flux": flux, "flux_rf": ctx["flux_rf"],
        "K_mm_MHz": {str(m): nl.kerr[i, i] / TWO_PI / 1e6 for i, m in enumerate(idx)},
        "g_mn_MHz": {f"{r[0]}{r[1]}": r[2] for r in pair_rows},
    }


def _kerr_sweep(ctx, pool):
    from .dynamics import kerr_sweep

    lo, hi = ctx["flux_range"]
    return kerr_sweep(ctx.spec, np.linspace(lo, hi, ctx["grid"]), executor=pool)


def _blockade_case(sweep, case, epsilon, samples):
    from .dynamics import (blockade_steady_state, flux_for_ratio, rabi_periods, rings,
                           simulate_blockade)

    flux = flux_for_ratio(sweep, case["kerr_to_kappa"])
    kerr = float(sweep.kerr_at(flux))
    kappa = float(sweep.kappa_at(flux))
    omega = float(np.interp(flux, sweep.flux, sweep.omega))
    traj = simulate_blockade(omega, kerr, kappa, TWO_PI * epsilon, case["t_end_s"],
                             dimension=int(case["fock"]), samples=samples)
    summary = {"label": case["label"], "flux": flux, "K_over_kappa": kerr / kappa,
               "K_MHz": kerr / TWO_PI / 1e6, "kappa_MHz": kappa / TWO_PI / 1e6,
               "max_n": float(traj.n_mean.max()), "final_n": float(traj.n_mean[-1]),
               "rabi_periods": rabi_periods(traj.p1), "rings": bool(rings(traj.n_mean)),
               "steady_n": blockade_steady_state(kerr, kappa, TWO_PI * epsilon, int(case["fock"])),
               "fock": int(case["fock"]),
               "trace_drift": traj.trace_drift, "dt_s": traj.dt}
    return traj, summary


def cmd_blockade(ctx, out):
    with ctx.executor() as pool:
        sweep = _kerr_sweep(ctx, pool)
        cases = ctx["blockade_cases"]
        results = _map(ctx, pool, _blockade_case, [sweep] * len(cases), cases,
                        [ctx["epsilon_hz"]] * len(cases), [ctx["samples"]] * len(cases))
    summaries = []
    for traj, summary in results:
        write_csv(out / f"trajectory_{summary['label']}.csv", ["t_ns", "n_mean", "p1", "purity"],
                  traj.to_rows())
        summaries.append(summary)
    return {"cases": summaries}


def _cat_run(sweep, alpha, exp):
    from .dynamics import simulate_cat, wigner

    res = simulate_cat(sweep, alpha, start=exp["flux_start"], peak=exp["flux_peak"],
                       t_ramp=exp["t_ramp_s"], dimension=int(exp["fock"]))
    grid = np.linspace(-exp["wigner_extent"], exp["wigner_extent"], int(exp["wigner_points"]))
    w = wigner(res.final_state, grid, grid)
    return res, grid, w


def cmd_cat(ctx, out):
    alphas = [float(a) for a in ctx["alphas"]]
    exp = ctx.experiment
    with ctx.executor() as pool:
        sweep = _kerr_sweep(ctx, pool)
        runs = _map(ctx, pool, _cat_run, [sweep] * len(alphas), alphas, [exp] * len(alphas))
    summaries = []
    for alpha, (res, grid, w) in zip(alphas, runs):
        tag = f"alpha_{alpha:.4f}".replace(".", "p")
        write_csv(out / f"trajectory_{tag}.csv", ["t_ns", "n_mean", "p1", "purity"],
                  res.trajectory.to_rows())
        t = res.trajectory.times
        pulse = res.pulse(t)
        write_csv(out / f"pulse_{tag}.csv", ["t_ns", "flux", "K_MHz"],
                  [[ti * 1e9, fi, float(sweep.kerr_at(fi)) / TWO_PI / 1e6] for ti, fi in zip(t, pulse)])
        write_csv(out / f"wigner_{tag}.csv", ["x", "p", "W"],
                  [[x, p, w[j, i]] for j, p in enumerate(grid) for i, x in enumerate(grid)])
        summaries.append({"alpha": alpha, "fidelity": res.fidelity, "theta": res.theta,
                          "tau_used_ns": res.tau_used * 1e9, "plateau_ns": res.pulse.t_plateau * 1e9,
                          "wigner_min": float(w.min()), "trace_drift": res.trajectory.trace_drift})
    write_csv(out / "kerr_sweep.csv", ["flux", "f1_GHz", "K_MHz", "kappa_MHz"],
              [[f, o / TWO_PI / 1e9, k / TWO_PI / 1e6, q / TWO_PI / 1e6]
               for f, o, k, q in zip(sweep.flux, sweep.omega, sweep.kerr, sweep.kappa)])
    return {"cats": summaries}


def cmd_ultrastrong(ctx, out):
    from .effective import (avoided_crossing, current_biased_coupling, end_coupled_model,
                            end_coupled_ratio)

    with ctx.executor() as pool:
        report, table = avoided_crossing(ctx.spec, tuple(ctx["flux_range"]), ctx["grid"],
                                         executor=pool)
    write_csv(out / "ultrastrong_sweep.csv",
              ["flux", "f1_GHz", "f2_GHz", "f_r_eff_GHz", "f_p_eff_GHz", "K11_MHz", "K22_MHz",
               "eta_l1", "eta_l2"],
              [[p.flux, p.omega_1 / TWO_PI / 1e9, p.omega_2 / TWO_PI / 1e9,
                p.omega_r_eff / TWO_PI / 1e9, p.omega_p_eff / TWO_PI / 1e9,
                p.kerr_11 / TWO_PI / 1e6, p.kerr_22 / TWO_PI / 1e6, p.eta_l1, p.eta_l2]
               for p in table])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        eff = end_coupled_model(ctx.spec, report.provenance["flux"])
    results = {
        "exact": {"flux": report.provenance["flux"], "g_over_omega_p": report.ratio,
                  "g_MHz": report.g / TWO_PI / 1e6, "f_p_GHz": report.omega_p / TWO_PI / 1e9},
        "end_coupled": {"g_over_omega_p": eff.ratio, "E_C_MHz": eff.provenance["ec_hz"] / 1e6,
                        "Z_r_renorm_ohm": eff.provenance["z_r_renorm"],
                        "charge_coupling_negligible": eff.provenance["charge_coupling_negligible"]},
    }
    ref = ctx["reference_points"]
    if ref:
        cb = ref["current_biased"]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rep = current_biased_coupling(cb["L_H"], cb["C_F"], cb["cj_f"], cb["ej_hz"])
        ec = ref["end_coupled"]
        results["current_biased_point"] = {"inputs": cb, "g_over_omega_p": rep.ratio}
        results["end_coupled_point"] = {
            "inputs": ec,
            "g_over_omega_p": end_coupled_ratio(ec["z_r_ohm"], ec["ej_over_ec"], 1.0)}
    return results


HANDLERS = {
    "validate": cmd_validate, "spectrum": cmd_spectrum, "sweep-flux": cmd_sweep_flux,
    "sweep-position": cmd_sweep_position, "sweep-length": cmd_sweep_length, "jpc": cmd_jpc,
    "blockade": cmd_blockade, "cat": cmd_cat, "ultrastrong": cmd_ultrastrong,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="kerrline", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kerrline {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="config path or shipped name (" + ", ".join(shipped_configs()) + ")")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted-path override, repeatable")
        p.add_argument("--modes", type=int, default=None)
        p.add_argument("--grid", type=int, default=None)
        p.add_argument("--fock", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
    return parser


def run(args):
    document = json.loads(resolve_config(args.config))
    document = apply_overrides(document, args.overrides)
    spec = load_and_validate_spec(document)
    ctx = Context(args, document, spec)
    for key in ("modes", "grid", "fock"):
        if int(ctx[key]) < 1:
            raise ConfigError(f"experiment.{key}", "must be a positive integer")
    out = args.out
    if out is None and args.command != "validate":
        raise ConfigError("--out", "an output directory is required")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    results = HANDLERS[args.command](ctx, out)
    if out is not None:
        write_manifest(out, ctx, results)
    return results


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except ConfigError as exc:
        print(f"kerrline: invalid input: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"kerrline: invalid input: config is not valid JSON ({exc})", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"kerrline: numerical failure in {args.command}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 2
    except KerrlineError as exc:
        print(f"kerrline: invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
