"""Nuclide chain: decay data, burnup transmutation, and matrix assembly.

The chain is loaded from a versioned JSON data file (a default one ships with
the package) and provides the rate matrices consumed by the depletion solver.
State vectors are indexed in file order; every non-sink nuclide is an output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ChainError

MEV_TO_J = 1.602176634e-13
AVOGADRO = 6.02214076e23
SECONDS_PER_DAY = 86400.0
SECONDS_PER_YEAR = 365.25 * SECONDS_PER_DAY

# Each (1 + coeff*relative_offset) modifier is floored here so that extreme
# extrapolation cannot flip a reaction rate negative.
MIN_RATE_FACTOR = 1e-3

CHAIN_FORMAT = "spentfuel-chain"


@dataclass(frozen=True)
class CaptureReaction:
    """One parent -> child transmutation during burnup."""

    parent: int
    child: int
    rate_coeff: float  # 1/s per W/gU at reference temperature and boron
    temp_coeff: float
    boron_coeff: float


@dataclass(frozen=True)
class FissionReaction:
    """Fission of one parent, feeding tracked fission products and the sink."""

    parent: int
    rate_coeff: float
    temp_coeff: float
    boron_coeff: float
    yield_cs137: float
    yield_sr90: float


@dataclass
class NuclideChain:
    """In-memory chain with assembled decay matrix and propagator cache."""

    version: str
    names: tuple[str, ...]
    molar_mass: np.ndarray
    decay_const: np.ndarray  # 1/s, 0 for stable nuclides
    heat_per_decay: np.ndarray  # J per decay
    decay_child: np.ndarray  # index of daughter, -1 for stable
    captures: tuple[CaptureReaction, ...]
    fissions: tuple[FissionReaction, ...]
    ref_temp: float = 887.0
    ref_boron: float = 310.0
    _decay_matrix: np.ndarray | None = field(default=None, repr=False, compare=False)
    _propagators: dict[float, np.ndarray] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self):
        self.molar_mass = np.asarray(self.molar_mass, dtype=float)
        self.decay_const = np.asarray(self.decay_const, dtype=float)
        self.heat_per_decay = np.asarray(self.heat_per_decay, dtype=float)
        self.decay_child = np.asarray(self.decay_child, dtype=int)
        self._validate()

    # -- structure ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ChainError(f"unknown nuclide {name!r}") from None

    @property
    def stable_indices(self) -> np.ndarray:
        return np.flatnonzero(self.decay_const == 0.0)

    @property
    def output_indices(self) -> np.ndarray:
        """All nuclides except stable sinks, in file order."""
        return np.flatnonzero(self.decay_const > 0.0)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(self.names[i] for i in self.output_indices)

    def _validate(self):
        n = self.n
        if len(set(self.names)) != n:
            raise ChainError("duplicate nuclide names")
        for arr, label in [
            (self.molar_mass, "molar_mass"),
            (self.decay_const, "decay_const"),
            (self.heat_per_decay, "heat_per_decay"),
        ]:
            if arr.shape != (n,) or not np.all(np.isfinite(arr)):
                raise ChainError(f"{label} must be a finite length-{n} vector")
        if np.any(self.decay_const < 0.0):
            raise ChainError("decay constants must be >= 0")
        if np.any(self.molar_mass <= 0.0):
            raise ChainError("molar masses must be > 0")
        if len(self.stable_indices) == 0:
            raise ChainError("chain has no stable terminal nuclide")
        for i in range(n):
            child = self.decay_child[i]
            if self.decay_const[i] > 0.0:
                if not 0 <= child < n:
                    raise ChainError(f"{self.names[i]} decays but has no daughter")
            elif child != -1:
                raise ChainError(f"stable {self.names[i]} must not have a daughter")
        # Every decay path must terminate at a stable nuclide (no cycles).
        for i in range(n):
            j, hops = i, 0
            while self.decay_const[j] > 0.0:
                j = int(self.decay_child[j])
                hops += 1
                if hops > n:
                    raise ChainError(f"decay cycle reachable from {self.names[i]}")
        for r in self.captures:
            if not (0 <= r.parent < n and 0 <= r.child < n):
                raise ChainError("capture reaction references unknown nuclide")
            if r.rate_coeff < 0.0:
                raise ChainError("capture rate coefficients must be >= 0")
        if self.fissions:
            for name in ("cs137", "sr90"):
                if name not in self.names:
                    raise ChainError(f"fission requires tracked product {name!r}")
        for r in self.fissions:
            if not 0 <= r.parent < n:
                raise ChainError("fission reaction references unknown nuclide")
            if r.rate_coeff < 0.0:
                raise ChainError("fission rate coefficients must be >= 0")
            total_yield = r.yield_cs137 + r.yield_sr90
            if r.yield_cs137 < 0.0 or r.yield_sr90 < 0.0 or total_yield > 2.0:
                raise ChainError("fission yields must be >= 0 and sum to <= 2")

    # -- matrices ----------------------------------------------------------

    def decay_matrix(self) -> np.ndarray:
        """Pure-decay rate matrix; columns conserve atoms exactly."""
        if self._decay_matrix is None:
            a = np.zeros((self.n, self.n))
            for i in range(self.n):
                lam = self.decay_const[i]
                if lam > 0.0:
                    a[i, i] -= lam
                    a[self.decay_child[i], i] += lam
            self._decay_matrix = a
        return self._decay_matrix

    def rate_factor(self, coeff_t: float, coeff_b: float, fuel_temp: float, boron: float) -> float:
        ft = max(1.0 + coeff_t * (fuel_temp - self.ref_temp) / self.ref_temp, MIN_RATE_FACTOR)
        fb = max(1.0 + coeff_b * (boron - self.ref_boron) / self.ref_boron, MIN_RATE_FACTOR)
        return ft * fb

    def burnup_matrix(self, power: float, boron: float, fuel_temp: float) -> np.ndarray:
        """Decay plus transmutation rate matrix for one burnup cycle.

        Capture and fission rates scale linearly with specific power and
        smoothly with fuel temperature and boron concentration.
        """
        a = self.decay_matrix().copy()
        for r in self.captures:
            k = r.rate_coeff * power * self.rate_factor(
                r.temp_coeff, r.boron_coeff, fuel_temp, boron
            )
            a[r.parent, r.parent] -= k
            a[r.child, r.parent] += k
        if self.fissions:
            i_cs, i_sr = self.index("cs137"), self.index("sr90")
            i_sink = int(self.stable_indices[0])
            for r in self.fissions:
                k = r.rate_coeff * power * self.rate_factor(
                    r.temp_coeff, r.boron_coeff, fuel_temp, boron
                )
                a[r.parent, r.parent] -= k
                a[i_cs, r.parent] += r.yield_cs137 * k
                a[i_sr, r.parent] += r.yield_sr90 * k
                a[i_sink, r.parent] += (2.0 - r.yield_cs137 - r.yield_sr90) * k
        return a

    def decay_propagator(self, years: float) -> np.ndarray:
        """exp(D * t) for a fixed cooling time, cached per chain instance."""
        prop = self._propagators.get(years)
        if prop is None:
            from scipy.linalg import expm

            prop = expm(self.decay_matrix() * (years * SECONDS_PER_YEAR))
            self._propagators[years] = prop
        return prop

    def decay_heat(self, state: np.ndarray) -> float:
        """Total decay heat in W/tU for a state vector in mol/tU."""
        return float(self.decay_const @ (state * self.heat_per_decay) * AVOGADRO)


def _build(raw: dict, source: str) -> NuclideChain:
    if raw.get("format") != CHAIN_FORMAT:
        raise ChainError(f"{source}: not a {CHAIN_FORMAT} file")
    try:
        version = str(raw["version"])
        ref = raw.get("reference", {})
        flux_coeff = float(raw["flux_coeff"])
        nuclides = raw["nuclides"]
        names = tuple(str(rec["name"]) for rec in nuclides)
        index = {name: i for i, name in enumerate(names)}
        molar = np.array([float(rec["molar_mass"]) for rec in nuclides])
        lam = np.zeros(len(nuclides))
        child = np.full(len(nuclides), -1, dtype=int)
        heat = np.zeros(len(nuclides))
        for i, rec in enumerate(nuclides):
            hl = rec["half_life_s"]
            if hl is not None:
                if float(hl) <= 0.0:
                    raise ChainError(f"{source}: non-positive half life for {names[i]}")
                lam[i] = math.log(2.0) / float(hl)
                child[i] = index[rec["decay_to"]]
            heat[i] = float(rec["q_mev"]) * MEV_TO_J
        captures = tuple(
            CaptureReaction(
                parent=index[rec["parent"]],
                child=index[rec["child"]],
                rate_coeff=float(rec["sigma_b"]) * flux_coeff,
                temp_coeff=float(rec["temp_coeff"]),
                boron_coeff=float(rec["boron_coeff"]),
            )
            for rec in raw.get("captures", [])
        )
        fissions = tuple(
            FissionReaction(
                parent=index[rec["parent"]],
                rate_coeff=float(rec["sigma_b"]) * flux_coeff,
                temp_coeff=float(rec["temp_coeff"]),
                boron_coeff=float(rec["boron_coeff"]),
                yield_cs137=float(rec["yield_cs137"]),
                yield_sr90=float(rec["yield_sr90"]),
            )
            for rec in raw.get("fissions", [])
        )
    except ChainError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ChainError(f"{source}: malformed chain data: {exc}") from exc
    return NuclideChain(
        version=version,
        names=names,
        molar_mass=molar,
        decay_const=lam,
        heat_per_decay=heat,
        decay_child=child,
        captures=captures,
        fissions=fissions,
        ref_temp=float(ref.get("fuel_temp_K", 887.0)),
        ref_boron=float(ref.get("boron_ppm", 310.0)),
    )


def load_chain(path: str | Path) -> NuclideChain:
    """Load a chain from a JSON data file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ChainError(f"cannot read chain file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ChainError(f"{path}: invalid JSON: {exc}") from exc
    return _build(raw, str(path))


_default_chain: NuclideChain | None = None


def default_chain() -> NuclideChain:
    """The chain shipped with the package (loaded once per process)."""
    global _default_chain
    if _default_chain is None:
        data = resources.files("spentfuel").joinpath("data/nuclide_chain.json")
        _default_chain = _build(json.loads(data.read_text()), "builtin chain")
    return _default_chain
