"""Reduced-order depletion model standing in for a full lattice code.

simulate() builds the scaled irradiation history for an input, integrates the
nuclide chain through every burnup and cooling cycle with matrix exponentials
(scipy's scaling-and-squaring Pade expm), and reports decay heat at 25 fixed
cooling times plus 28 end-of-life nuclide concentrations: 53 outputs total.
All functions are pure; identical inputs give bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .chain import SECONDS_PER_DAY, NuclideChain, default_chain
from .errors import DepletionError
from .history import (
    AssemblyInput,
    BurnupCycle,
    Cycle,
    IrradiationHistory,
    build_history,
    reference_history,
)

# Cooling times (years) at which decay heat is evaluated.
COOLING_TIMES_Y: tuple[float, ...] = (2.0, 5.0) + tuple(
    float(t) for t in range(10, 31)
) + (100.0, 1000.0)

N_DECAY_HEAT = len(COOLING_TIMES_Y)  # 25
N_CONCENTRATIONS = 28
N_OUTPUTS = N_DECAY_HEAT + N_CONCENTRATIONS  # 53

DECAY_HEAT_LABELS = tuple(f"dh_{t:g}y" for t in COOLING_TIMES_Y)

# Grams of uranium in one metric ton; the state vector is mol per tU.
GRAMS_PER_TU = 1.0e6


@dataclass(frozen=True)
class SnfOutput:
    """Decay heat in W/tU at the fixed cooling times and EOL masses in g/tU."""

    decay_heat: np.ndarray
    concentrations: np.ndarray

    def __post_init__(self):
        dh = np.asarray(self.decay_heat, dtype=float)
        conc = np.asarray(self.concentrations, dtype=float)
        if dh.shape != (N_DECAY_HEAT,):
            raise ValueError(f"decay_heat must have {N_DECAY_HEAT} entries")
        if conc.shape != (N_CONCENTRATIONS,):
            raise ValueError(f"concentrations must have {N_CONCENTRATIONS} entries")
        object.__setattr__(self, "decay_heat", dh)
        object.__setattr__(self, "concentrations", conc)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.decay_heat, self.concentrations])


def output_labels(chain: NuclideChain | None = None) -> tuple[str, ...]:
    """Fixed column order: 25 decay-heat entries, then the nuclide masses."""
    chain = chain or default_chain()
    return DECAY_HEAT_LABELS + chain.output_names


def fresh_composition(chain: NuclideChain, enrichment: float) -> np.ndarray:
    """Fresh fuel in mol/tU: enrichment% u235 by mass, the rest u238."""
    state = np.zeros(chain.n)
    i235, i238 = chain.index("u235"), chain.index("u238")
    state[i235] = enrichment / 100.0 * GRAMS_PER_TU / chain.molar_mass[i235]
    state[i238] = (100.0 - enrichment) / 100.0 * GRAMS_PER_TU / chain.molar_mass[i238]
    return state


def _check_state(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=float).copy()
    if state.ndim != 1:
        raise DepletionError("state must be a 1-d vector")
    if not np.all(np.isfinite(state)):
        raise DepletionError("state contains non-finite entries")
    # expm output can carry harmless -1e-30 style round-off; anything larger
    # in magnitude is a genuine modelling error.
    tol = 1e-12 * max(1.0, float(np.abs(state).max()))
    if np.any(state < -tol):
        raise DepletionError("state contains negative entries")
    np.clip(state, 0.0, None, out=state)
    return state


def deplete_cycle(
    state: np.ndarray,
    cycle: Cycle,
    chain: NuclideChain,
    inp: AssemblyInput,
) -> np.ndarray:
    """Propagate a state vector through one cycle: exp(A*dt) @ state.

    Cooling cycles use the pure-decay matrix; burnup cycles add the
    power/boron/temperature-dependent transmutation rates.
    """
    state = _check_state(state)
    if state.shape != (chain.n,):
        raise DepletionError(f"state has {state.shape[0]} entries, chain has {chain.n}")
    if isinstance(cycle, BurnupCycle):
        a = chain.burnup_matrix(cycle.power, cycle.boron, inp.fuel_temp)
    else:
        a = chain.decay_matrix()
    if not np.all(np.isfinite(a)):
        raise DepletionError("rate matrix contains non-finite entries")
    new_state = expm(a * (cycle.duration_days * SECONDS_PER_DAY)) @ state
    np.clip(new_state, 0.0, None, out=new_state)
    return new_state


def simulate(
    inp: AssemblyInput,
    chain: NuclideChain | None = None,
    base: IrradiationHistory | None = None,
) -> SnfOutput:
    """Run the full depletion for one assembly input.

    Inputs outside the training sampling ranges are allowed; only positivity
    is required. The chain must track exactly the 28 standard output nuclides
    (any chain with that shape can be substituted via the data file).
    """
    chain = chain or default_chain()
    if len(chain.output_indices) != N_CONCENTRATIONS:
        raise DepletionError(
            f"simulate needs a chain with {N_CONCENTRATIONS} output nuclides, "
            f"got {len(chain.output_indices)}"
        )
    history = build_history(base or reference_history(), inp)
    state = fresh_composition(chain, inp.enrichment)
    for cycle in history.cycles:
        state = deplete_cycle(state, cycle, chain, inp)
    eol = state
    concentrations = eol[chain.output_indices] * chain.molar_mass[chain.output_indices]
    decay_heat = np.array(
        [chain.decay_heat(chain.decay_propagator(t) @ eol) for t in COOLING_TIMES_Y]
    )
    return SnfOutput(decay_heat=decay_heat, concentrations=concentrations)


def simulate_vector(
    vec: np.ndarray,
    chain: NuclideChain | None = None,
) -> np.ndarray:
    """simulate() for a raw 5-vector, returning the 53-vector."""
    return simulate(AssemblyInput.from_vector(vec), chain=chain).as_vector()
