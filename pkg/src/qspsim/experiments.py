"""Experiment configuration, phase caching and the reproduction drivers.

Each ``run_*`` function takes a validated config dict and a PhaseCache and
returns ``(columns, rows, summary)``; the CLI owns all file output.
"""

import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from . import algorithms as al
from . import complexity as cx
from . import numerics as nm
from . import polyapprox as pa
from .encoding import dilation_encoding, heisenberg_hamiltonian, load_h2, load_pauli_sum
from .errors import ConfigError, ParseError, SynthesisError
from .qsp_engine import PhaseVector

LOW_CONFIDENCE = 0.85

_COMMON = {
    "synthesis.tolerance": 1e-8,
    "synthesis.max_iter": 500,
    "synthesis.seed": 0,
    "synthesis.strict": False,
}

DEFAULTS = {
    "heisenberg_ti": {
        **_COMMON,
        "model.sites": 2,
        "model.h": 0.5,
        "model.gx": 1.0,
        "model.gy": 0.0,
        "model.gz": 0.0,
        "model.alpha": 1.5,
        "model.beta": 0.4,
        "model.initial_state": "00",
        "poly.d_cos": 6,
        "poly.d_sin": 5,
        "poly.d_eece": 32,
        "time.start": 0.0,
        "time.stop": 3.5,
        "time.points": 36,
        "observable.site": 0,
    },
    "heisenberg_td": {
        **_COMMON,
        "synthesis.max_iter": 0,
        "model.sites": 2,
        "model.h0": 0.0,
        "model.h_slope": 1.0 / 15.0,
        "model.gx": 1.0,
        "model.gy": 0.0,
        "model.gz": 0.0,
        "model.alpha": 2.5,
        "model.beta": 0.25,
        "model.initial_state": "00",
        "poly.d_cos": 2,
        "poly.d_sin": 3,
        "poly.d_eece": 14,
        "time.dt": 0.5,
        "time.steps": 24,
        "exact.substeps": al.RK4_SUBSTEPS,
        "observable.site": 0,
    },
    "h2": {
        **_COMMON,
        "model.pauli_file": "",
        "model.alpha": 1.0,
        "model.beta": 0.5,
        "model.initial_state": "0101",
        "model.orbitals": "0,2",
        "poly.d_cos": 6,
        "poly.d_sin": 5,
        "poly.d_eece": 32,
        "time.stop_fs": 0.15,
        "time.points": 31,
        "time.period_points": 3001,
    },
    "complexity_sweep": {
        "model.alpha": 5.0,
        "model.beta": 0.5,
        "sweep.delta_factor": 2.0,
        "sweep.t_fixed": 5.0,
        "sweep.t_start": 1.0,
        "sweep.t_stop": 10.0,
        "sweep.t_points": 19,
        "sweep.eps_fixed": 0.02,
        "sweep.eps_min": 1e-4,
        "sweep.eps_max": 1e-1,
        "sweep.eps_points": 13,
    },
    "approx_report": {
        "cos.tau": 5.25,
        "cos.eps": 1e-3,
        "sin.tau": 5.25,
        "sin.eps": 1e-3,
        "sign.eps": 0.01,
        "sign.delta": 0.5,
        "exp_decay.a": 8.0,
        "exp_decay.eps": 1e-4,
        "eece.t": 1.0,
        "eece.alpha": 1.5,
        "eece.beta": 0.4,
        "eece.eps": 0.05,
    },
    "phases": {
        **_COMMON,
        "synthesis.tolerance": 1e-10,
        "synthesis.max_iter": 0,
        "phases.target": "cos",
        "phases.tau": 1.0,
        "phases.degree": 6,
        "phases.lo": -1.0,
        "phases.hi": 1.0,
    },
}


# ---------------------------------------------------------------- configuration


def parse_config_text(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParseError("empty key", lineno)
        out[key] = value
    return out


def _coerce(key, raw, default):
    if isinstance(raw, type(default)) and not isinstance(default, bool):
        return raw
    text = str(raw).strip()
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            v = float(text)
            if not math.isfinite(v):
                raise ValueError
            return v
    except ValueError:
        raise ConfigError(f"{key}: cannot interpret {text!r} as {type(default).__name__}") from None
    return text


def build_config(experiment, file_values=None, overrides=None, seed=None):
    """Merge defaults, file values and ``key=value`` overrides, then validate."""
    if experiment not in DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    defaults = DEFAULTS[experiment]
    cfg = dict(defaults)
    layers = [file_values or {}]
    extra = {}
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        extra[k.strip()] = v.strip()
    layers.append(extra)
    for layer in layers:
        for key, raw in layer.items():
            if key == "experiment":
                if raw != experiment:
                    raise ConfigError(f"config is for experiment {raw!r}, not {experiment!r}")
                continue
            if key not in defaults:
                raise ConfigError(f"unknown configuration key {key!r}")
            cfg[key] = _coerce(key, raw, defaults[key])
    if seed is not None:
        if "synthesis.seed" not in defaults:
            raise ConfigError(f"experiment {experiment!r} does not take a seed")
        cfg["synthesis.seed"] = int(seed)
    validate_config(experiment, cfg)
    return cfg


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def validate_config(experiment, cfg):
    if "poly.d_cos" in cfg:
        _require(cfg["poly.d_cos"] >= 0 and cfg["poly.d_cos"] % 2 == 0, "poly.d_cos must be even and nonnegative")
        _require(cfg["poly.d_sin"] >= 1 and cfg["poly.d_sin"] % 2 == 1, "poly.d_sin must be odd")
        _require(cfg["poly.d_eece"] >= 0 and cfg["poly.d_eece"] % 2 == 0, "poly.d_eece must be even and nonnegative")
    if "model.alpha" in cfg:
        _require(cfg["model.alpha"] > 0, "model.alpha must be positive")
    if "model.beta" in cfg:
        _require(0 < cfg["model.beta"] < 1, "model.beta must lie in (0, 1)")
    if "synthesis.tolerance" in cfg:
        _require(cfg["synthesis.tolerance"] > 0, "synthesis.tolerance must be positive")
        _require(cfg["synthesis.max_iter"] >= 0, "synthesis.max_iter must be nonnegative (0 = automatic)")
        _require(cfg["synthesis.seed"] >= 0, "synthesis.seed must be nonnegative")
    if "model.initial_state" in cfg:
        s = cfg["model.initial_state"]
        _require(s and set(s) <= {"0", "1"}, "model.initial_state must be a bit string")
    if experiment in ("heisenberg_ti", "heisenberg_td"):
        _require(cfg["model.sites"] >= 2, "model.sites must be at least 2")
        _require(len(cfg["model.initial_state"]) == cfg["model.sites"], "model.initial_state length must equal model.sites")
        _require(0 <= cfg["observable.site"] < cfg["model.sites"], "observable.site out of range")
    if experiment == "heisenberg_ti":
        _require(cfg["time.points"] >= 1, "time.points must be positive")
        _require(cfg["time.stop"] >= cfg["time.start"], "time.stop must not precede time.start")
    if experiment == "heisenberg_td":
        _require(cfg["time.steps"] >= 1, "time.steps must be positive")
        _require(cfg["time.dt"] > 0, "time.dt must be positive")
        _require(cfg["exact.substeps"] >= 1, "exact.substeps must be positive")
    if experiment == "h2":
        path = cfg["model.pauli_file"]
        _require(not path or Path(path).is_file(), f"Pauli file {path!r} does not exist")
        _require(cfg["time.points"] >= 2 and cfg["time.period_points"] >= 3, "time grids need at least two points")
        _require(cfg["time.stop_fs"] > 0, "time.stop_fs must be positive")
        parse_orbitals(cfg["model.orbitals"])
    if experiment == "complexity_sweep":
        _require(cfg["sweep.t_points"] >= 1 and cfg["sweep.eps_points"] >= 1, "sweeps need at least one point")
        _require(0 < cfg["sweep.eps_min"] <= cfg["sweep.eps_max"] < 1, "need 0 < eps_min <= eps_max < 1")
    if experiment == "phases":
        _require(cfg["phases.target"] in ("cos", "sin", "eece", "sign"), "phases.target must be cos, sin, eece or sign")
        _require(cfg["phases.degree"] >= 0, "phases.degree must be nonnegative")
        _require(-1 <= cfg["phases.lo"] < cfg["phases.hi"] <= 1, "need -1 <= phases.lo < phases.hi <= 1")


def parse_orbitals(text):
    try:
        vals = tuple(int(v) for v in str(text).split(","))
    except ValueError:
        raise ConfigError(f"model.orbitals must be comma-separated integers, got {text!r}") from None
    if not vals:
        raise ConfigError("model.orbitals is empty")
    return vals


def format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def config_header(experiment, cfg):
    lines = [f"experiment = {experiment}"]
    lines += [f"{k} = {format_value(cfg[k])}" for k in sorted(cfg)]
    return lines


# ---------------------------------------------------------------- phase cache


class PhaseCache:
    """On-disk store of synthesized phases.

    Entries are keyed by the request plus the key of the warm start it was
    solved from, so a cached chain reproduces an uncached run exactly.
    """

    def __init__(self, directory=None, strict=False):
        self.directory = Path(directory) if directory else None
        self.strict = strict
        self.hits = 0
        self.misses = 0

    @staticmethod
    def default_directory():
        base = os.environ.get("QSPSIM_CACHE_DIR")
        if base:
            return Path(base)
        return Path.home() / ".cache" / "qspsim" / "phases"

    def solve(self, req, init=None, chain=""):
        """Returns ``(PhaseVector, achieved_error, converged, key)``."""
        key = hashlib.sha256(f"{req.key()}|{chain}".encode()).hexdigest()[:32]
        path = self.directory / f"{key}.json" if self.directory else None
        if path is not None and path.is_file():
            try:
                blob = json.loads(path.read_text(encoding="utf-8"))
                pv = PhaseVector(np.array(blob["phases"], dtype=float))
                err, conv = float(blob["error"]), bool(blob["converged"])
                self.hits += 1
                return self._check(req, pv, err, conv, key)
            except (ValueError, KeyError, TypeError):
                pass
        self.misses += 1
        res = req.solve(init=init)
        pv = res.phases
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            blob = {"request": req.key(), "phases": [float(p) for p in pv.phases], "error": res.achieved_error, "converged": res.converged}
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(blob), encoding="utf-8")
            tmp.replace(path)
        return self._check(req, pv, res.achieved_error, res.converged, key)

    def _check(self, req, pv, err, conv, key):
        if self.strict and not conv:
            raise SynthesisError(f"{req.target} phases (degree {req.degree}, tau {req.tau:.6g}) reached {err:.3e} > {req.tolerance:.3e}")
        return pv, err, conv, key


def _max_iter(cfg):
    return cfg["synthesis.max_iter"] or None


def _lcu_phases(cfg, cache, tau):
    rc, rs = al.lcu_requests(tau, cfg["poly.d_cos"], cfg["poly.d_sin"], cfg["synthesis.tolerance"], cfg["synthesis.seed"])
    rc = al.PhaseRequest(**{**rc.__dict__, "max_iter": _max_iter(cfg)})
    rs = al.PhaseRequest(**{**rs.__dict__, "max_iter": _max_iter(cfg)})
    pc, *_ = cache.solve(rc)
    ps, *_ = cache.solve(rs)
    return pc, ps, al.scalar_error(rc, pc) + al.scalar_error(rs, ps)


# ---------------------------------------------------------------- fits


def linear_fit(x, y):
    """Least-squares line; returns dict of slope, intercept, r2 and the fitted value at max(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(a, y, rcond=None)
    pred = slope * x + intercept
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2, "end": float(slope * x.max() + intercept)}


def first_return_period(t, y):
    """Time of the first local minimum after the first local maximum (parabolic refinement)."""
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    peaks = np.where((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1
    if peaks.size == 0:
        return float("nan")
    after = np.where((y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:]))[0] + 1
    after = after[after > peaks[0]]
    if after.size == 0:
        return float("nan")
    k = int(after[0])
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    denom = y0 - 2 * y1 + y2
    shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    return float(t[k] + shift * (t[k + 1] - t[k]))


def _initial_state(bits):
    return nm.basis_state(int(bits, 2), len(bits)).astype(complex)


# ---------------------------------------------------------------- drivers


def run_heisenberg_ti(cfg, cache):
    n = cfg["model.sites"]
    g = (cfg["model.gx"], cfg["model.gy"], cfg["model.gz"])
    h = heisenberg_hamiltonian(n, g, [cfg["model.h"]] * n).to_matrix()
    alpha, beta = cfg["model.alpha"], cfg["model.beta"]
    site = cfg["observable.site"]
    psi0 = _initial_state(cfg["model.initial_state"])
    enc = dilation_encoding(h, alpha)
    times = np.linspace(cfg["time.start"], cfg["time.stop"], cfg["time.points"])
    columns = ["t", "sigma_z_exact", "sigma_z_roaa", "sigma_z_os", "err_roaa", "err_os", "p_roaa", "p_os"]
    rows = []
    prev, chain = None, ""
    op_errors = {"roaa": [], "os": []}
    eece_errors = []
    for t in times:
        pc, ps, _ = _lcu_phases(cfg, cache, alpha * t)
        req = al.eece_request(t, alpha, beta, cfg["poly.d_eece"], cfg["synthesis.tolerance"], cfg["synthesis.seed"], _max_iter(cfg))
        pe, _, _, chain = cache.solve(req, init=prev, chain=chain)
        prev = pe
        ro = al.qsp_lcu_roaa(enc, t, None, pc, ps, psi0)
        os_ = al.one_shot(enc, t, None, beta, pe, psi0)
        exact = nm.matrix_exp_hermitian(h, t) @ psi0
        sz = al.expectation_sigma_z(exact, site)
        s_ro = al.expectation_sigma_z(ro.final_state, site)
        s_os = al.expectation_sigma_z(os_.final_state, site)
        rows.append([t, sz, s_ro, s_os, abs(s_ro - sz), abs(s_os - sz), ro.success_probability, os_.success_probability])
        op_errors["roaa"].append(ro.operator_error)
        op_errors["os"].append(os_.operator_error)
        eece_errors.append(al.scalar_error(req, pe))
    arr = np.array(rows)
    early = arr[:, 0] <= 1.5 + 1e-12
    summary = {
        "queries_roaa": 3 * (cfg["poly.d_cos"] + cfg["poly.d_sin"]),
        "queries_os": cfg["poly.d_eece"],
        "mean_p_roaa": float(arr[:, 6].mean()),
        "mean_p_os": float(arr[:, 7].mean()),
        "max_err_roaa_t_le_1.5": float(arr[early, 4].max()) if early.any() else None,
        "max_err_os_t_le_1.5": float(arr[early, 5].max()) if early.any() else None,
        "max_operator_error_roaa": float(max(op_errors["roaa"])),
        "max_operator_error_os": float(max(op_errors["os"])),
        "max_eece_error": float(max(eece_errors)),
    }
    return columns, rows, summary


def _td_hamiltonian(cfg):
    n = cfg["model.sites"]
    g = (cfg["model.gx"], cfg["model.gy"], cfg["model.gz"])
    base = heisenberg_hamiltonian(n, g, [0.0] * n).to_matrix()
    field = heisenberg_hamiltonian(n, (0, 0, 0), [1.0] * n).to_matrix()
    h0, slope = cfg["model.h0"], cfg["model.h_slope"]
    return lambda t: base + (h0 + slope * t) * field


def run_heisenberg_td(cfg, cache):
    alpha, beta, dt, steps = cfg["model.alpha"], cfg["model.beta"], cfg["time.dt"], cfg["time.steps"]
    site = cfg["observable.site"]
    psi0 = _initial_state(cfg["model.initial_state"])
    spec = al.TimeDependentSpec(_td_hamiltonian(cfg), dt * steps, steps)
    exact = al.exact_evolution_td(spec, cfg["exact.substeps"], checkpoints=True)
    ideal = al.ideal_trotter_unitaries(spec)
    pc, ps, lcu_err = _lcu_phases(cfg, cache, alpha * dt)
    req = al.eece_request(dt, alpha, beta, cfg["poly.d_eece"], cfg["synthesis.tolerance"], cfg["synthesis.seed"], _max_iter(cfg))
    pe, _, _, _ = cache.solve(req)
    step_cfg = al.TrotterStepConfig(alpha, beta, pc, ps, pe)
    runs = {"roaa": al.trotter_evolve(spec, "roaa", step_cfg, psi0), "os": al.trotter_evolve(spec, "one_shot", step_cfg, psi0)}
    columns = [
        "t",
        "sigma_z_exact",
        "sigma_z_trotter_ideal",
        "sigma_z_roaa",
        "sigma_z_os",
        "err_trotter_ideal",
        "err_roaa",
        "err_os",
        "p_roaa",
        "p_os",
        "p_step_roaa",
        "p_step_os",
        "operator_err_trotter_ideal",
        "operator_err_roaa",
        "operator_err_os",
        "excess_roaa",
        "excess_os",
    ]
    rows = []
    for k in range(steps + 1):
        u_ex = exact[k]
        sz = al.expectation_sigma_z(u_ex @ psi0, site)
        s_id = al.expectation_sigma_z(ideal[k] @ psi0, site)
        op_id = nm.spectral_norm(ideal[k] - u_ex)
        if k == 0:
            vals = {"roaa": (sz, 1.0, 1.0, 0.0, 0.0), "os": (sz, 1.0, 1.0, 0.0, 0.0)}
        else:
            vals = {}
            for name, outs in runs.items():
                o = outs[k - 1]
                if name == "os":
                    op = al.phase_removed_error(o.block_operator, u_ex)
                else:
                    op = nm.spectral_norm(o.block_operator - u_ex)
                vals[name] = (al.expectation_sigma_z(o.final_state, site), o.success_probability, o.step_probability, op, o.operator_error)
        r, o = vals["roaa"], vals["os"]
        rows.append([k * dt, sz, s_id, r[0], o[0], abs(s_id - sz), abs(r[0] - sz), abs(o[0] - sz), r[1], o[1], r[2], o[2], op_id, r[3], o[3], r[4], o[4]])
    arr = np.array(rows)
    t = arr[:, 0]
    col = {c: arr[:, i] for i, c in enumerate(columns)}
    summary = {
        "queries_per_step_roaa": 3 * (cfg["poly.d_cos"] + cfg["poly.d_sin"]),
        "queries_per_step_os": cfg["poly.d_eece"],
        "lcu_scalar_error": lcu_err,
        "eece_scalar_error": al.scalar_error(req, pe),
        "mean_p_roaa": float(col["p_roaa"].mean()),
        "mean_p_os": float(col["p_os"].mean()),
        "mean_step_p_roaa": float(col["p_step_roaa"][1:].mean()),
        "mean_step_p_os": float(col["p_step_os"][1:].mean()),
        "fit_sigma_z_err": {k: linear_fit(t, col[f"err_{k}"]) for k in ("trotter_ideal", "roaa", "os")},
        "fit_operator_err": {k: linear_fit(t, col[f"operator_err_{k}"]) for k in ("trotter_ideal", "roaa", "os")},
        "fit_excess": {k: linear_fit(t, col[f"excess_{k}"]) for k in ("roaa", "os")},
    }
    return columns, rows, summary


def run_h2(cfg, cache):
    ham = load_pauli_sum(cfg["model.pauli_file"]) if cfg["model.pauli_file"] else load_h2()
    h = ham.to_matrix()
    norm = nm.spectral_norm(h)
    alpha = cfg["model.alpha"] * norm
    beta = cfg["model.beta"]
    orbitals = parse_orbitals(cfg["model.orbitals"])
    bits = cfg["model.initial_state"]
    if len(bits) != ham.qubit_count or max(orbitals) >= ham.qubit_count or min(orbitals) < 0:
        raise ConfigError("initial state or orbitals do not match the Hamiltonian's qubit count")
    psi0 = _initial_state(bits)
    enc = dilation_encoding(h, alpha)
    t_fs = np.linspace(0.0, cfg["time.stop_fs"], cfg["time.points"])
    columns = ["t_fs", "nA_exact", "nA_roaa", "nA_os", "err_roaa", "err_os", "p_roaa", "p_os", "low_confidence_roaa", "low_confidence_os"]
    rows = []
    prev, chain = None, ""
    for tf in t_fs:
        t = tf / al.ATOMIC_TIME_FS
        pc, ps, _ = _lcu_phases(cfg, cache, alpha * t)
        req = al.eece_request(t, alpha, beta, cfg["poly.d_eece"], cfg["synthesis.tolerance"], cfg["synthesis.seed"], _max_iter(cfg))
        pe, _, _, chain = cache.solve(req, init=prev, chain=chain)
        prev = pe
        ro = al.qsp_lcu_roaa(enc, t, None, pc, ps, psi0)
        os_ = al.one_shot(enc, t, None, beta, pe, psi0)
        ne = al.occupation_number(nm.matrix_exp_hermitian(h, t) @ psi0, orbitals)
        nr = al.occupation_number(ro.final_state, orbitals)
        no = al.occupation_number(os_.final_state, orbitals)
        pr, po = ro.success_probability, os_.success_probability
        rows.append([tf, ne, nr, no, abs(nr - ne), abs(no - ne), pr, po, int(pr < LOW_CONFIDENCE), int(po < LOW_CONFIDENCE)])
    arr = np.array(rows, dtype=float)
    dense = np.linspace(0.0, cfg["time.stop_fs"], cfg["time.period_points"])
    lam, v = nm.hermitian_eig(h)
    amp = v.conj().T @ psi0
    curve = [al.occupation_number(v @ (np.exp(-1j * lam * (tf / al.ATOMIC_TIME_FS)) * amp), orbitals) for tf in dense]
    good_os = arr[:, 7] >= LOW_CONFIDENCE
    good_ro = arr[:, 6] >= LOW_CONFIDENCE
    summary = {
        "hamiltonian_norm": float(norm),
        "alpha_absolute": float(alpha),
        "queries_roaa": 3 * (cfg["poly.d_cos"] + cfg["poly.d_sin"]),
        "queries_os": cfg["poly.d_eece"],
        "period_fs_exact": first_return_period(dense, curve),
        "max_nA_exact": float(max(curve)),
        "t_fs_of_max_nA_exact": float(dense[int(np.argmax(curve))]),
        "mean_err_os_confident": float(arr[good_os, 5].mean()) if good_os.any() else None,
        "mean_err_roaa_confident": float(arr[good_ro, 4].mean()) if good_ro.any() else None,
        "confident_rows_os": int(good_os.sum()),
        "confident_rows_roaa": int(good_ro.sum()),
    }
    return columns, rows, summary


def run_complexity_sweep(cfg, cache=None):
    alpha, beta, dfac = cfg["model.alpha"], cfg["model.beta"], cfg["sweep.delta_factor"]
    ts = np.linspace(cfg["sweep.t_start"], cfg["sweep.t_stop"], cfg["sweep.t_points"])
    eps = np.geomspace(cfg["sweep.eps_min"], cfg["sweep.eps_max"], cfg["sweep.eps_points"])
    t_rows = cx.complexity_table(ts, [cfg["sweep.eps_fixed"]], alpha, beta, dfac)
    e_rows = cx.complexity_table([cfg["sweep.t_fixed"]], eps, alpha, beta, dfac)
    columns = ["sweep", *cx.CSV_HEADER]
    rows = [["time", r.algorithm, r.t, r.alpha, r.beta, r.epsilon, r.delta, r.queries] for r in t_rows]
    rows += [["epsilon", r.algorithm, r.t, r.alpha, r.beta, r.epsilon, r.delta, r.queries] for r in e_rows]
    return columns, rows, {"rows": len(rows)}


def run_approx_report(cfg, cache=None):
    # Jacobi-Anger entries report the raw truncation, whose error the r-function bounds by eps
    reports = []
    p = pa.jacobi_anger_cos(cfg["cos.tau"], cfg["cos.eps"], rescale=False)
    reports.append(pa.measure_error(p, ("cos", {"tau": cfg["cos.tau"]}), eps_requested=cfg["cos.eps"], name=f"cos(tau={cfg['cos.tau']:g})"))
    p = pa.jacobi_anger_sin(cfg["sin.tau"], cfg["sin.eps"], rescale=False)
    reports.append(pa.measure_error(p, ("sin", {"tau": cfg["sin.tau"]}), eps_requested=cfg["sin.eps"], name=f"sin(tau={cfg['sin.tau']:g})"))
    eps, delta = cfg["sign.eps"], cfg["sign.delta"]
    p = pa.sign_poly(eps, delta)
    outside = [(-1.0, -delta / 2), (delta / 2, 1.0)]
    reports.append(pa.measure_error(p, ("sign", {}), outside, eps_requested=eps, name=f"sign(delta={delta:g})"))
    a = cfg["exp_decay.a"]
    p = pa.exp_decay_poly(a, cfg["exp_decay.eps"])
    reports.append(pa.measure_error(p, ("exp_decay", {"a": a}), eps_requested=cfg["exp_decay.eps"], name=f"exp_decay(a={a:g})"))
    beta = cfg["eece.beta"]
    tau = 2 * cfg["eece.t"] * cfg["eece.alpha"] / beta
    p = pa.eece_poly(cfg["eece.eps"], 1 - beta, tau)
    reports.append(pa.measure_error(p, ("exp", {"tau": tau}), [((1 - beta) / 2, 1.0)], eps_requested=cfg["eece.eps"], name=f"eece(tau={tau:g})"))
    return reports


def run_phases(cfg, cache):
    req = al.PhaseRequest(
        cfg["phases.target"],
        cfg["phases.tau"],
        cfg["phases.degree"],
        cfg["phases.lo"],
        cfg["phases.hi"],
        cfg["synthesis.tolerance"],
        cfg["synthesis.seed"],
        _max_iter(cfg),
    )
    pv, err, conv, _ = cache.solve(req)
    return pv, err, conv
