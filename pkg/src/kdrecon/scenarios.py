"""Scenario files: schema validation, object construction, and orchestration.

A scenario is a JSON object with a ``kind`` selecting the pipeline; unknown
keys anywhere in the file are rejected by name so typos fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cv, photonics
from .core import ObservableSpec, QuantumState, pauli_spec, random_observable, random_state
from .errors import OrderingTagMismatch, SchemaError, ShapeMismatch
from .moments import correlation_matrix, correlation_tensor, moment_vector
from .oracle import (
    PseudoDistribution,
    kd_conditional,
    kd_joint,
    kd_npoint,
    postselection_probability,
)
from .reconstruct import (
    conditional_from_moments,
    joint_from_correlations,
    npoint_from_correlations,
)
from .serialize import (
    complex_array_from_json,
    pseudo_from_dict,
    pseudo_to_dict,
    read_json,
    write_json,
    write_plot_csv,
    write_pseudo_csv,
)

KINDS = (
    "discrete-conditional",
    "discrete-joint",
    "discrete-npoint",
    "cv-conditional",
    "cv-joint",
    "experiment",
    "ccr",
)

_COMMON_KEYS = {"kind", "seed"}

_KIND_KEYS = {
    "discrete-conditional": {
        "required": {"state", "observable_a", "observable_b", "postselect_index"},
        "optional": {"moment_orders": None, "renormalize": False},
    },
    "discrete-joint": {
        "required": {"state", "observable_a", "observable_b"},
        "optional": {"renormalize": False},
    },
    "discrete-npoint": {
        "required": {"state", "observables"},
        "optional": {"renormalize": False},
    },
    "cv-conditional": {
        "required": {"grid", "state", "post_momentum_index"},
        "optional": {},
    },
    "cv-joint": {
        "required": {"grid", "state"},
        "optional": {"ordering": "x-then-p"},
    },
    "experiment": {
        "required": {"grid", "state", "epsilon", "shots"},
        "optional": {
            "mode": "x-then-p",
            "post_index": None,
            "joint": False,
            "min_counts": 100,
        },
    },
    "ccr": {"required": {"grid", "state"}, "optional": {}},
}


@dataclass(frozen=True)
class Scenario:
    kind: str
    params: dict
    seed: int


def _check_keys(obj: dict, allowed, context: str):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise SchemaError(f"unknown key {sorted(unknown)[0]!r} in {context}")


def _validated(raw: dict) -> Scenario:
    if not isinstance(raw, dict):
        raise SchemaError("scenario must be a JSON object")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"kind must be one of {KINDS}, got {kind!r}")
    spec = _KIND_KEYS[kind]
    allowed = _COMMON_KEYS | spec["required"] | set(spec["optional"])
    _check_keys(raw, allowed, "scenario")
    missing = spec["required"] - set(raw)
    if missing:
        raise SchemaError(f"missing required key {sorted(missing)[0]!r} for kind {kind}")
    params = {k: v for k, v in raw.items() if k not in _COMMON_KEYS}
    for key, default in spec["optional"].items():
        params.setdefault(key, default)
    return Scenario(kind=kind, params=params, seed=int(raw.get("seed", 0)))


def load_scenario(path) -> Scenario:
    scenario = _validated(read_json(path))
    # eagerly construct every referenced object so bad specs fail at load time
    _build_inputs(scenario)
    return scenario


# -- input object builders ---------------------------------------------------

def _build_state(spec, context="state") -> QuantumState:
    _check_keys(spec, {"amplitudes", "random"}, context)
    if "amplitudes" in spec:
        amps = complex_array_from_json(spec["amplitudes"], (len(spec["amplitudes"]),))
        return QuantumState.normalized(amps)
    if "random" in spec:
        _check_keys(spec["random"], {"dim", "seed"}, f"{context}.random")
        return random_state(int(spec["random"]["dim"]), int(spec["random"].get("seed", 0)))
    raise SchemaError(f"{context} needs 'amplitudes' or 'random'")


def _build_observable(spec, context="observable") -> ObservableSpec:
    _check_keys(spec, {"pauli", "eigenvalues", "eigenvectors", "random", "label"}, context)
    label = spec.get("label")
    if "pauli" in spec:
        return pauli_spec(spec["pauli"], label=label)
    if "random" in spec:
        _check_keys(spec["random"], {"dim", "seed"}, f"{context}.random")
        return random_observable(
            int(spec["random"]["dim"]), int(spec["random"].get("seed", 0)),
            label=label or "A",
        )
    if "eigenvalues" in spec and "eigenvectors" in spec:
        d = len(spec["eigenvalues"])
        vecs = np.stack(
            [complex_array_from_json(col, (d,)) for col in spec["eigenvectors"]], axis=1
        )
        return ObservableSpec(spec["eigenvalues"], vecs, label=label or "A")
    raise SchemaError(f"{context} needs 'pauli', 'random', or eigenvalues+eigenvectors")


def _build_grid(spec) -> cv.Grid:
    _check_keys(spec, {"n", "length", "hbar"}, "grid")
    try:
        return cv.Grid(int(spec["n"]), float(spec["length"]), float(spec.get("hbar", 1.0)))
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"invalid grid: {exc}") from exc


def _build_cv_state(spec, grid: cv.Grid) -> cv.WaveFunction:
    _check_keys(
        spec,
        {"type", "center", "momentum", "width", "n", "separation", "phase", "seed", "modes"},
        "state",
    )
    kind = spec.get("type")
    if kind == "gaussian":
        return cv.gaussian_state(
            grid,
            center=float(spec.get("center", 0.0)),
            momentum=float(spec.get("momentum", 0.0)),
            width=float(spec.get("width", 1.0)),
        )
    if kind == "hermite":
        return cv.hermite_state(grid, int(spec["n"]), width=float(spec.get("width", 1.0)))
    if kind == "two-peak":
        return cv.two_peak_state(
            grid,
            separation=float(spec.get("separation", 4.0)),
            width=float(spec.get("width", 1.0)),
            phase=float(spec.get("phase", 0.0)),
        )
    if kind == "random-smooth":
        return cv.random_smooth_state(
            grid, int(spec.get("seed", 0)), modes=int(spec.get("modes", 6))
        )
    raise SchemaError(f"unknown cv state type {kind!r}")


def _build_inputs(sc: Scenario) -> dict:
    p = sc.params
    built = {}
    if sc.kind.startswith("discrete"):
        built["state"] = _build_state(p["state"])
        if sc.kind == "discrete-npoint":
            built["observables"] = [
                _build_observable(o, f"observables[{i}]")
                for i, o in enumerate(p["observables"])
            ]
        else:
            built["observable_a"] = _build_observable(p["observable_a"], "observable_a")
            built["observable_b"] = _build_observable(p["observable_b"], "observable_b")
    else:
        built["grid"] = _build_grid(p["grid"])
        built["state"] = _build_cv_state(p["state"], built["grid"])
    return built


# -- orchestration -----------------------------------------------------------

def _write_distribution(out: Path, pd: PseudoDistribution, stem="distribution"):
    write_json(out / f"{stem}.json", pseudo_to_dict(pd))
    write_pseudo_csv(pd, out / f"{stem}.csv")


def _plot_columns_1d(coords, values, coord_name="x"):
    return {coord_name: coords, "re": np.real(values), "im": np.imag(values)}


def run_scenario(sc: Scenario, out_dir, emit_oracle: bool = False) -> dict:
    """Execute the scenario's reconstruction pipeline; write artifacts; return
    a diagnostics dict (also written to diagnostics.json)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    built = _build_inputs(sc)
    p = sc.params
    diag = {"kind": sc.kind, "seed": sc.seed}

    if sc.kind == "discrete-conditional":
        psi, a, b = built["state"], built["observable_a"], built["observable_b"]
        j = int(p["postselect_index"])
        phi = QuantumState(b.eigenvector(j))
        mv = moment_vector(a, psi, phi, orders=p["moment_orders"])
        result = conditional_from_moments(a, mv, renormalize=p["renormalize"])
        oracle_pd = kd_conditional(psi, a, b, j)
        diag["postselection_probability"] = postselection_probability(psi, b, j)
        plot = _plot_columns_1d(a.eigenvalues, result.values, "eigenvalue")
    elif sc.kind == "discrete-joint":
        psi, a, b = built["state"], built["observable_a"], built["observable_b"]
        c = correlation_matrix(a, b, psi)
        result = joint_from_correlations(a, b, c, renormalize=p["renormalize"])
        k = kd_joint(psi, a, b)
        oracle_pd = PseudoDistribution(
            np.conj(k.values), k.axes, ordering_tag="kd-conjugate"
        )
        ii, jj = np.meshgrid(a.eigenvalues, b.eigenvalues, indexing="ij")
        plot = {
            "a": ii.ravel(), "b": jj.ravel(),
            "re": result.values.real.ravel(), "im": result.values.imag.ravel(),
        }
    elif sc.kind == "discrete-npoint":
        psi, obs = built["state"], built["observables"]
        c = correlation_tensor(obs, psi)
        result = npoint_from_correlations(obs, c, renormalize=p["renormalize"])
        oracle_pd = kd_npoint(psi, obs)
        plot = {
            "flat_index": np.arange(result.values.size),
            "re": result.values.real.ravel(), "im": result.values.imag.ravel(),
        }
    elif sc.kind == "cv-conditional":
        grid, w = built["grid"], built["state"]
        ip = int(p["post_momentum_index"])
        z = cv.weak_char_fn(w, grid.p[ip])
        q = cv.conditional_pseudo_cv(z)
        result = PseudoDistribution(
            q, ("x",), ordering_tag="cv-conditional",
            conditioning=z.conditioning, cell_weight=grid.dx,
        )
        oracle_pd = _cv_conditional_oracle(grid, w, ip)
        diag["post_momentum"] = float(grid.p[ip])
        plot = _plot_columns_1d(grid.x, q)
    elif sc.kind == "cv-joint":
        grid, w = built["grid"], built["state"]
        k = cv.joint_kd_cv(w, p["ordering"])
        result = PseudoDistribution(
            k, ("x", "p"), ordering_tag=f"cv-{p['ordering']}", cell_weight=grid.dx * grid.dp
        )
        oracle_pd = result
        xx, pp = np.meshgrid(grid.x, grid.p, indexing="ij")
        plot = {"x": xx.ravel(), "p": pp.ravel(), "re": k.real.ravel(), "im": k.imag.ravel()}
    elif sc.kind == "experiment":
        grid, w = built["grid"], built["state"]
        post = p["post_index"]
        res = photonics.run_reconstruction(
            w,
            epsilon=float(p["epsilon"]),
            shots=None if p["shots"] is None else int(p["shots"]),
            seed=sc.seed,
            mode=p["mode"],
            post_index=None if post is None else int(post),
            joint=bool(p["joint"]),
            min_counts=int(p["min_counts"]),
        )
        diag.update(res.diagnostics)
        diag["post_selection_rates"] = [float(r) for r in res.rates]
        if res.conditional is not None:
            result = PseudoDistribution(
                res.conditional, ("x",), ordering_tag="cv-conditional",
                conditioning=f"pixel={post}", cell_weight=grid.dx,
            )
            diag["conditional_standard_error"] = float(res.conditional_se[0])
            coords = grid.x if p["mode"] == "x-then-p" else grid.p
            plot = _plot_columns_1d(coords, res.conditional)
            oracle_pd = _cv_conditional_oracle(grid, w, int(post)) \
                if p["mode"] == "x-then-p" else None
        elif res.joint is not None:
            result = PseudoDistribution(
                res.joint, ("x", "p"),
                ordering_tag="cv-x-then-p" if p["mode"] == "x-then-p" else "cv-p-then-x",
                cell_weight=grid.dx * grid.dp,
            )
            xx, pp = np.meshgrid(grid.x, grid.p, indexing="ij")
            plot = {"x": xx.ravel(), "p": pp.ravel(),
                    "re": res.joint.real.ravel(), "im": res.joint.imag.ravel()}
            ordering = p["mode"]
            oracle_pd = PseudoDistribution(
                cv.joint_kd_cv(w, ordering), ("x", "p"),
                ordering_tag=f"cv-{ordering}", cell_weight=grid.dx * grid.dp,
            )
        else:
            raise SchemaError("experiment scenario needs post_index or joint=true")
    elif sc.kind == "ccr":
        grid, w = built["grid"], built["state"]
        witness = cv.ccr_witness(w)
        diag["witness"] = {"re": witness.real, "im": witness.imag}
        diag["expected"] = {"re": 0.0, "im": grid.hbar}
        write_json(out / "diagnostics.json", diag)
        return diag
    else:  # pragma: no cover
        raise SchemaError(f"unhandled kind {sc.kind}")

    total = result.total
    diag["sum"] = {"re": total.real, "im": total.imag}
    diag["sum_deviation"] = abs(total - 1.0)
    _write_distribution(out, result)
    write_plot_csv(out / "plot.csv", plot)
    if emit_oracle and oracle_pd is not None:
        _write_distribution(out, oracle_pd, stem="oracle")
    write_json(out / "diagnostics.json", diag)
    return diag


def _cv_conditional_oracle(grid: cv.Grid, w: cv.WaveFunction, ip: int) -> PseudoDistribution:
    """Weak-valued position projector <p|x><x|psi>/<p|psi> on the grid."""
    psi_p = cv.to_momentum(w).samples
    bra_p_x = np.exp(-1j * grid.p[ip] * grid.x / grid.hbar) / np.sqrt(2 * np.pi * grid.hbar)
    q = bra_p_x * w.samples / psi_p[ip]
    return PseudoDistribution(
        q, ("x",), ordering_tag="cv-conditional",
        conditioning=f"p={grid.p[ip]:.6g}", cell_weight=grid.dx,
    )


def compare_distributions(path_a, path_b, tol: float) -> dict:
    """Elementwise diff of two pseudo-distribution JSON files."""
    a = pseudo_from_dict(read_json(path_a))
    b = pseudo_from_dict(read_json(path_b))
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    if a.ordering_tag != b.ordering_tag:
        raise OrderingTagMismatch(
            f"ordering tags differ: {a.ordering_tag!r} vs {b.ordering_tag!r}"
        )
    delta = np.abs(a.values - b.values)
    max_delta = float(np.max(delta)) if delta.size else 0.0
    report = {"max_delta": max_delta, "tol": tol, "pass": bool(max_delta <= tol)}
    if not report["pass"]:
        worst = np.unravel_index(int(np.argmax(delta)), delta.shape)
        report["entries"] = [
            {
                "index": [int(v) for v in idx],
                "a": {"re": a.values[idx].real, "im": a.values[idx].imag},
                "b": {"re": b.values[idx].real, "im": b.values[idx].imag},
                "delta": float(delta[idx]),
            }
            for idx in np.ndindex(*delta.shape)
            if delta[idx] > tol
        ]
        report["worst_index"] = [int(v) for v in worst]
    return report
