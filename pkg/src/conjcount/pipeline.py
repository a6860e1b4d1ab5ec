"""Build, verify, count, fit and summarise one configured experiment."""

from __future__ import annotations

import json
import math
import os
from functools import cached_property
from pathlib import Path

import numpy as np

from . import group as fg
from .coding import AugmentedShift, build_coset_acceptor, build_geodesic_acceptor, scc_decompose
from .config import ExperimentConfig
from .counting import (
    count_conjugacy_class,
    count_coset_orbit,
    count_cylinder_restricted,
    count_full_orbit,
    estimate_C,
    fit_rate,
    fit_ratio,
    length_comparison_audit,
    poincare_partial,
)
from .errors import ConjCountError
from .potential import RoofPotential, birkhoff_displacement_check
from .spectral import lattice_test, maximal_path_multiplicity, pressure_curve, system_delta

BIRKHOFF_TOL = 1e-9


def format_float(x: float) -> str:
    return f"{x:.17g}"


def _encode(obj, indent=0) -> str:
    """JSON with every float at 17 significant digits and sorted keys."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(_encode(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format_float(x)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def dumps(obj) -> str:
    return _encode(obj) + "\n"


class ArtifactDir:
    """Writes files atomically: content goes to ``name.partial`` and is renamed when complete."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.written = []

    def write(self, name: str, writer) -> Path:
        final = self.root / name
        tmp = self.root / (name + ".partial")
        with open(tmp, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, final)
        self.written.append(name)
        return final

    def write_text(self, name: str, text: str) -> Path:
        return self.write(name, lambda fh: fh.write(text))

    def write_partial(self, name: str, text: str) -> Path:
        p = self.root / (name + ".partial")
        p.write_text(text)
        return p


class Experiment:
    """Lazily built objects for one configuration."""

    def __init__(self, cfg: ExperimentConfig, jobs: int = 1, depth: int | None = None, tmax: float | None = None):
        self.cfg = cfg
        self.jobs = jobs
        self.depth = depth if depth is not None else cfg.effective_depth
        self.tmax = tmax

    @cached_property
    def gens(self):
        return self.cfg.generators()

    @cached_property
    def system(self):
        return self.cfg.system()

    @cached_property
    def g(self):
        return self.cfg.g_word(self.gens)

    @cached_property
    def geodesic(self):
        return build_geodesic_acceptor(self.gens)

    @cached_property
    def coset(self):
        return build_coset_acceptor(
            self.gens, self.g, self.cfg.signature_radius, self.cfg.verify_len, self.cfg.state_budget
        )

    @cached_property
    def shift(self):
        return AugmentedShift.from_automaton(self.geodesic)

    @cached_property
    def coset_shift(self):
        return AugmentedShift.from_automaton(self.coset)

    @cached_property
    def components(self):
        return scc_decompose(self.shift)

    @cached_property
    def coset_components(self):
        return scc_decompose(self.coset_shift)

    @cached_property
    def potential(self):
        return RoofPotential(self.shift, self.system)

    @cached_property
    def coset_potential(self):
        return RoofPotential(self.coset_shift, self.system)

    @cached_property
    def delta(self):
        a, maximal = system_delta(self.components, self.potential, self.depth)
        return a, maximal

    @cached_property
    def lattice(self):
        comp = self.components.components[min(self.delta[1])]
        return lattice_test(comp, self.potential, self.cfg.lattice_orbit_len)

    def lattice_mode(self):
        mode = self.cfg.lattice_mode
        if mode == "off":
            return None
        if mode == "on":
            return True
        return True if self.lattice.arithmetic else None

    def t_max(self, value):
        return self.tmax if self.tmax is not None else value

    # -- stages ------------------------------------------------------------

    def pressure(self):
        comp = self.components.components[min(self.delta[1])]
        lo, hi, step = self.cfg.t_grid
        ts = np.arange(lo, hi + step / 2, step)
        return pressure_curve(comp, self.potential, self.depth, ts)

    def count(self, kind: str, prefix=None):
        c = self.cfg
        kw = {"jobs": self.jobs, "provenance": c.digest}
        grid = _grid(c.grid)
        if kind == "full":
            return count_full_orbit(self.system, self.t_max(c.full_t_max), grid, self.geodesic, **kw)
        if kind == "coset":
            return count_coset_orbit(self.system, self.g, self.t_max(c.coset_t_max or c.full_t_max), grid,
                                     self.coset, min_verified=c.verify_len, **kw)
        if kind == "cylinder":
            u = self.gens.parse(prefix or "")
            return count_cylinder_restricted(self.system, self.g, u, self.t_max(c.coset_t_max or c.full_t_max), grid,
                                             self.coset, delta=self.delta[0], min_verified=c.verify_len, **kw)
        if kind == "conjugacy":
            return count_conjugacy_class(self.system, self.g, self.t_max(c.conj_t_max), grid, self.coset,
                                         min_verified=c.verify_len, **kw)
        raise ValueError(kind)

    def fit(self, series, window):
        if window is None:
            hi = float(series.thresholds[-1])
            window = (hi / 2, hi)
        return fit_rate(series, window, self.lattice_mode())

    def audit(self):
        return length_comparison_audit(
            self.system, self.g, self.coset, self.cfg.audit_depths, self.cfg.audit_extend, seed=self.cfg.seed
        )

    def C_estimates(self):
        c = self.cfg
        t_ref = c.c_t_ref if c.c_t_ref is not None else c.conj_t_max / 2
        return [estimate_C(self.system, self.g, self.coset, l, t_ref, self.delta[0]) for l in c.c_depths]

    def poincare(self, full):
        delta = self.delta[0]
        top = self.cfg.poincare_t_max
        if top is not None and top > full.thresholds[-1]:
            full = count_full_orbit(self.system, top, None, self.geodesic, jobs=self.jobs, provenance=self.cfg.digest)
        out = []
        for off in self.cfg.poincare_offsets:
            p = poincare_partial(full, delta + off, top, rate=delta)
            out.append({"s": p.s, "offset": off, "value": p.value, "scaled": off * p.value,
                        "tail_bound": p.tail_bound, "converged": p.converged, "reliable": p.reliable})
        return out

    # -- verification ------------------------------------------------------

    def verify(self) -> list:
        """Oracle and invariant checks; returns ``(name, ok, detail)`` triples."""
        checks = []

        def run(name, fn):
            try:
                ok, detail = fn()
            except ConjCountError as exc:
                ok, detail = False, f"{exc.code}: {exc}"
            checks.append((name, bool(ok), detail))

        run("involution", self._check_involution)
        run("geometry", self._check_geometry)
        run("coset-acceptor", self._check_coset)
        run("birkhoff", self._check_birkhoff)
        run("structure", self._check_structure)
        run("length-comparison", self._check_audit)
        run("lattice", self._check_lattice)
        return checks

    def _check_involution(self):
        canon = fg.GeneratorSet(self.gens.rank)
        for n in range(5):
            mine = sorted(self.gens.format(w) for w in self.geodesic.language(n) if len(w) == n)
            ref = sorted(canon.format(w) for w in fg.reduced_words(canon, n))
            if mine != ref:
                extra = sorted(set(mine) - set(ref))[:3]
                return False, f"geodesic acceptor disagrees with capital-inverse reduction at length {n}: accepts {extra}"
        return True, "geodesic language matches free reduction to length 4"

    def _check_geometry(self):
        if self.system.is_tree:
            return True, "tree action"
        ok = self.system.is_schottky()
        return ok, "ping-pong discs disjoint" if ok else "ping-pong discs overlap"

    def _check_coset(self):
        a = self.coset
        return True, f"{a.n_states} states, oracle agreement to length {a.verified_len}"

    def _check_birkhoff(self):
        worst = 0.0
        n = 0
        for shift, auto in ((self.shift, self.geodesic), (self.coset_shift, self.coset)):
            for w in auto.language(6):
                lhs, rhs = birkhoff_displacement_check(shift, self.system, auto.path(w))
                worst = max(worst, abs(lhs - rhs))
                n += 1
        return worst <= BIRKHOFF_TOL, f"max |sum r - d| = {worst:.3g} over {n} paths"

    def _check_structure(self):
        cg = self.components
        tri = cg.is_block_lower_triangular() and self.coset_components.is_block_lower_triangular()
        _, maximal = self.delta
        m = maximal_path_multiplicity(cg, maximal)
        ok = tri and len(maximal) == 1 and m == 1
        return ok, f"block triangular={tri}, maximal components={len(maximal)}, m={m}"

    def _check_audit(self):
        audit = self.audit()
        errs = [e for _, e, _ in audit]
        if self.system.is_tree:
            core, _ = fg.cyclic_reduce(self.gens, self.g)
            if core == self.g:
                ok = max(errs) <= 1e-9
                return ok, f"max errors {errs}"
            return True, f"max errors {errs} (g not cyclically reduced)"
        mono = all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
        rho = fit_ratio(audit)
        return mono and rho < 1, f"max errors {errs}, fitted ratio {rho:.4g}"

    def _check_lattice(self):
        lat = self.lattice
        return True, f"{lat.verdict}" + (f", span {lat.span:.6g}" if lat.span else "")

    # -- full pipeline -----------------------------------------------------

    def summary(self, out: ArtifactDir) -> dict:
        c = self.cfg
        out.write_text("acceptor.txt", self.geodesic.to_text())
        out.write_text("coset_acceptor.txt", self.coset.to_text())
        curve = self.pressure()
        out.write("pressure_curve.csv", curve.to_csv)
        delta, maximal = self.delta
        m = maximal_path_multiplicity(self.components, maximal)

        full = self.count("full")
        out.write("count_full.csv", full.to_csv)
        coset = self.count("coset")
        out.write("count_coset.csv", coset.to_csv)
        conj = self.count("conjugacy")
        out.write("count_conjugacy.csv", conj.to_csv)

        fit_full = self.fit(full, c.fit_window)
        out.write("fit_full.json", lambda fh: fh.write(dumps(fit_full.to_dict())))
        fit_coset = self.fit(coset, c.fit_window)
        out.write("fit_coset.json", lambda fh: fh.write(dumps(fit_coset.to_dict())))
        fit_conj = self.fit(conj, c.conj_fit_window)
        out.write("fit_conjugacy.json", lambda fh: fh.write(dumps(fit_conj.to_dict())))

        audit = self.audit()
        audit_rows = [{"depth": l, "max_error": e, "pairs": n} for l, e, n in audit]
        out.write("length_audit.json", lambda fh: fh.write(dumps(audit_rows)))
        cs = self.C_estimates()
        out.write("C_estimates.json", lambda fh: fh.write(dumps(cs)))
        poinc = self.poincare(full)
        out.write("poincare.json", lambda fh: fh.write(dumps(poinc)))
        lat = self.lattice

        C = cs[-1]["C"] if cs else float("nan")
        T_top = float(conj.thresholds[-1])
        summary = {
            "config": c.name,
            "config_hash": c.digest,
            "g": self.gens.format(self.g),
            "depth": self.depth,
            "delta_pressure": delta,
            "delta_fit": fit_full.rate,
            "coset_rate": fit_coset.rate,
            "conjugacy_rate": fit_conj.rate,
            "ratio": fit_conj.rate / delta,
            "m": m,
            "maximal_components": len(maximal),
            "lattice_verdict": lat.verdict,
            "lattice_span": lat.span,
            "mixing_hypothesis_flag": bool(lat.arithmetic),
            "mixing_note": (
                "arithmetic length spectrum: the flow is not mixing, counts follow a staircase and fits use the lattice"
                if lat.arithmetic
                else "non-arithmetic length spectrum"
            ),
            "length_audit": audit_rows,
            "length_audit_ratio": fit_ratio(audit),
            "C_estimate": C,
            "C_by_depth": [{"l": x["l"], "C": x["C"]} for x in cs],
            "C_prediction_at_T": {"T": T_top, "predicted": C * math.exp(delta * T_top / 2),
                                   "counted": conj.counts[-1]},
            "poincare": poinc,
            "artifacts": {
                "delta_pressure": "pressure_curve.csv",
                "delta_fit": "fit_full.json",
                "conjugacy_rate": "fit_conjugacy.json",
                "length_audit": "length_audit.json",
                "C_estimate": "C_estimates.json",
                "poincare": "poincare.json",
            },
        }
        out.write("summary.json", lambda fh: fh.write(dumps(summary)))
        return summary


def _grid(spec: str):
    spec = spec.strip()
    if spec == "auto":
        return None
    lo, hi, step = (float(t) for t in spec.replace(",", " ").split())
    return np.arange(lo, hi + step / 2, step)
