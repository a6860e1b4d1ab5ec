"""Experiment configuration files (INI format).

Keys are documented in the README; the loader rejects unknown keys so that
typos fail loudly instead of silently falling back to defaults.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import group as fg
from .errors import UsageError
from .geometry import HalfPlane, Mobius
from .system import GroupSystem

SCHEMA = {
    "group": {"rank", "order", "involution", "space", "weights", "basepoint", "matrices"},
    "experiment": {"name", "g", "seed"},
    "coding": {"signature_radius", "verify_len", "state_budget"},
    "spectral": {"depth", "t_grid", "lattice_orbit_len"},
    "counting": {
        "full_t_max",
        "coset_t_max",
        "conj_t_max",
        "grid",
        "fit_window",
        "conj_fit_window",
        "lattice_mode",
        "audit_depths",
        "audit_extend",
        "c_depths",
        "c_t_ref",
        "poincare_offsets",
        "poincare_t_max",
    },
}


@dataclass
class ExperimentConfig:
    name: str
    rank: int
    space: str
    g: str
    order: str | None = None
    involution: str | None = None
    weights: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    basepoint: complex = 1j
    seed: int = 0
    signature_radius: int | None = None
    verify_len: int = 8
    state_budget: int = 100_000
    depth: int | None = None
    t_grid: tuple = (0.0, 2.0, 0.25)
    lattice_orbit_len: int = 6
    full_t_max: float = 20.0
    coset_t_max: float | None = None
    conj_t_max: float = 21.0
    grid: str = "auto"
    fit_window: tuple | None = None
    conj_fit_window: tuple | None = None
    lattice_mode: str = "auto"
    audit_depths: tuple = (1, 2, 3, 4, 5)
    audit_extend: int = 4
    c_depths: tuple = (3, 4)
    c_t_ref: float | None = None
    poincare_offsets: tuple = (0.2, 0.1, 0.05)
    poincare_t_max: float | None = None
    digest: str = ""

    # -- derived objects -------------------------------------------------

    def generators(self) -> fg.GeneratorSet:
        names = fg.letter_names(self.rank)
        lookup = {c: i for i, c in enumerate(names)}

        def perm(text, what):
            toks = text.split()
            if sorted(toks) != sorted(names):
                raise UsageError(f"{what} must list each of {' '.join(names)} once")
            return tuple(lookup[t] for t in toks)

        order = perm(self.order, "order") if self.order else None
        inv = perm(self.involution, "involution") if self.involution else None
        return fg.GeneratorSet(self.rank, order, inv)

    def g_word(self, gens=None) -> tuple:
        gens = gens or self.generators()
        return gens.parse(self.g)

    def system(self) -> GroupSystem:
        gens = self.generators()
        if self.space == "tree":
            return GroupSystem.tree(gens, {gens.names.index(k): v for k, v in self.weights.items()})
        mats = {}
        for k, entries in self.matrices.items():
            m = np.array(entries, dtype=float).reshape(2, 2)
            det = float(np.linalg.det(m))
            if abs(det - 1.0) > 1e-9:
                raise UsageError(f"matrix for {k} has determinant {det!r}, not 1")
            mats[gens.names.index(k)] = Mobius.from_array(m)
        return GroupSystem(gens, HalfPlane(), mats, self.basepoint)

    @property
    def effective_depth(self) -> int:
        if self.depth is not None:
            return self.depth
        return 2 if self.space == "tree" else 6


def _floats(text: str) -> tuple:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _ints(text: str) -> tuple:
    out = []
    for tok in text.replace(",", " ").split():
        if "-" in tok:
            lo, hi = tok.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(tok))
    return tuple(out)


def _number(text: str) -> float:
    """Float, also accepting ``sqrt(x)`` and ``a/b`` so irrational or rational weights stay readable."""
    t = text.strip()
    if t.startswith("sqrt(") and t.endswith(")"):
        return math.sqrt(_number(t[5:-1]))
    if "/" in t:
        num, den = t.split("/")
        return float(num) / float(den)
    return float(t)


def parse_config(text: str, name: str = "config") -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str.lower
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config: {exc}") from exc
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise UsageError(f"unknown config section [{sec}]")
        unknown = set(cp[sec]) - SCHEMA[sec]
        if unknown:
            raise UsageError(f"unknown keys in [{sec}]: {sorted(unknown)}")
    if not cp.has_section("group") or not cp.has_section("experiment"):
        raise UsageError("config needs [group] and [experiment] sections")
    grp, exp = cp["group"], cp["experiment"]
    g = exp.get("g", "").strip()
    if not g:
        raise UsageError("experiment.g must be a nonempty word")
    space = grp.get("space", "tree").strip()
    if space not in ("tree", "halfplane"):
        raise UsageError(f"unknown space {space!r}")
    cfg = ExperimentConfig(
        name=exp.get("name", name).strip(),
        rank=grp.getint("rank"),
        space=space,
        g=g,
        order=grp.get("order"),
        involution=grp.get("involution"),
        seed=exp.getint("seed", 0),
    )
    if "weights" in grp:
        for item in grp["weights"].replace(",", " ").split():
            k, v = item.split(":")
            cfg.weights[k.strip()] = _number(v)
    if "matrices" in grp:
        for line in grp["matrices"].strip().splitlines():
            k, rest = line.split(":")
            vals = tuple(_number(v) for v in rest.replace(",", " ").split())
            if len(vals) != 4:
                raise UsageError(f"matrix {k.strip()} needs four entries")
            cfg.matrices[k.strip()] = vals
    if space == "halfplane" and not cfg.matrices:
        raise UsageError("half-plane systems need [group] matrices")
    if "basepoint" in grp:
        x, y = _floats(grp["basepoint"])
        cfg.basepoint = complex(x, y)
    if cp.has_section("coding"):
        sec = cp["coding"]
        r = sec.get("signature_radius", "auto").strip()
        cfg.signature_radius = None if r == "auto" else int(r)
        cfg.verify_len = sec.getint("verify_len", cfg.verify_len)
        cfg.state_budget = sec.getint("state_budget", cfg.state_budget)
    if cp.has_section("spectral"):
        sec = cp["spectral"]
        if "depth" in sec:
            cfg.depth = sec.getint("depth")
        if "t_grid" in sec:
            cfg.t_grid = _floats(sec["t_grid"])
        cfg.lattice_orbit_len = sec.getint("lattice_orbit_len", cfg.lattice_orbit_len)
    if cp.has_section("counting"):
        sec = cp["counting"]
        for key in ("full_t_max", "coset_t_max", "conj_t_max", "c_t_ref", "poincare_t_max"):
            if key in sec:
                setattr(cfg, key, sec.getfloat(key))
        for key in ("fit_window", "conj_fit_window", "poincare_offsets"):
            if key in sec:
                setattr(cfg, key, _floats(sec[key]))
        for key in ("audit_depths", "c_depths"):
            if key in sec:
                setattr(cfg, key, _ints(sec[key]))
        cfg.audit_extend = sec.getint("audit_extend", cfg.audit_extend)
        cfg.grid = sec.get("grid", cfg.grid).strip()
        cfg.lattice_mode = sec.get("lattice_mode", cfg.lattice_mode).strip()
    if len(cfg.t_grid) != 3 or cfg.t_grid[2] <= 0 or cfg.t_grid[1] <= cfg.t_grid[0]:
        raise UsageError("spectral.t_grid is 'start stop step' with start < stop and step > 0")
    for w in (cfg.fit_window, cfg.conj_fit_window):
        if w is not None and (len(w) != 2 or w[1] <= w[0]):
            raise UsageError("fit windows are 'lo hi' with lo < hi")
    if cfg.lattice_mode not in ("auto", "on", "off"):
        raise UsageError("counting.lattice_mode is auto, on or off")
    canon = "\n".join(f"[{s}]\n" + "\n".join(f"{k}={cp[s][k].strip()}" for k in sorted(cp[s])) for s in sorted(cp.sections()))
    cfg.digest = hashlib.sha256(canon.encode()).hexdigest()[:16]
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    """Load a config file, or a shipped config when ``path`` names one."""
    p = Path(path)
    if p.exists():
        return parse_config(p.read_text(), p.stem)
    shipped = resources.files("conjcount") / "configs" / f"{path}.ini"
    if shipped.is_file():
        return parse_config(shipped.read_text(), str(path))
    raise UsageError(f"no config file {path!r}")


def shipped_configs() -> list:
    root = resources.files("conjcount") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))
