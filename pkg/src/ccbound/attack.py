"""Convex-combination eavesdropping attacks and key-rate upper bounds.

The attack splits the observed correlation into a local part (whose
outcomes the eavesdropper knows exactly) and a nonlocal remainder (about
which she knows nothing), then relabels her side information to minimize
the conditional mutual information available to the honest parties.  The
resulting intrinsic-information bound is zero up to a critical visibility
(v_local + 1)/(3 - v_local) that lies strictly above the locality
threshold, so a range of nonlocal correlations admits no secret key under
setting-announcing protocols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import (
    Correlation,
    MeasurementArrangement,
    chsh_arrangement,
    werner_correlation,
)
from .infotheory import JointDistribution, StochasticMap, apply_map, conditional_mutual_information
from .localset import local_visibility

# Locality threshold of the singlet/white-noise family under arbitrary
# projective measurements (literature value, exact closed form).
WERNER_LOCAL_VISIBILITY = 999 * 689 * 1e-6 * math.cos(math.pi / 50) ** 4

# Visibility above which some projective arrangement is known to produce a
# nonlocal correlation.  Externally sourced numerical constant (no closed
# form published); used only to exhibit the nonlocal-yet-keyless gap.
WERNER_NONLOCAL_VISIBILITY = 0.6964

MIXTURE_ATOL = 1e-12


class AttackError(ValueError):
    """An attack model is inconsistent with the correlation it targets."""


class BalanceInfeasibleError(ValueError):
    """No relabelling fraction in [0, 1] can zero the unknown-branch MI."""


@dataclass(frozen=True)
class CCDecomposition:
    """Observed correlation = local_weight * local + (1 - local_weight) * nonlocal_part."""

    local_weight: float
    local: Correlation
    nonlocal_part: Correlation

    def __post_init__(self):
        if not 0.0 <= self.local_weight <= 1.0:
            raise AttackError(f"local weight must lie in [0, 1], got {self.local_weight!r}")
        if self.local.scenario != self.nonlocal_part.scenario:
            raise AttackError("decomposition components live on different scenarios")

    @property
    def scenario(self):
        return self.local.scenario

    def mixture(self) -> Correlation:
        return self.local.mix(self.nonlocal_part, self.local_weight)


@dataclass(frozen=True)
class AttackModel:
    """A decomposition plus per-setting relabelling maps and setting weights."""

    decomposition: CCDecomposition
    maps: dict
    setting_weights: dict

    def __post_init__(self):
        total = sum(self.setting_weights.values())
        if abs(total - 1.0) > MIXTURE_ATOL:
            raise AttackError(f"setting weights sum to {total!r}, expected 1")
        for pair, weight in self.setting_weights.items():
            if weight < 0.0:
                raise AttackError(f"negative setting weight for {pair}")
            if weight > 0.0 and pair not in self.maps:
                raise AttackError(f"no relabelling map supplied for weighted setting {pair}")


def local_weight(visibility: float, local_visibility_value: float) -> float:
    """Local weight (1 - v)/(1 - v_local) of the convex-combination split."""
    if not 0.0 < local_visibility_value < 1.0:
        raise AttackError(f"local visibility must lie in (0, 1), got {local_visibility_value!r}")
    if visibility <= local_visibility_value:
        return 1.0
    return (1.0 - visibility) / (1.0 - local_visibility_value)


def cc_werner(
    visibility: float,
    arrangement: MeasurementArrangement,
    local_visibility_value: float = WERNER_LOCAL_VISIBILITY,
) -> CCDecomposition:
    """Convex-combination split of a noisy singlet correlation.

    Nonlocal part at visibility 1, local part at the locality threshold, and
    weight (1 - v)/(1 - v_local); by linearity in the visibility the mixture
    reproduces the observed correlation exactly.  Below the threshold the
    attack degenerates: weight 1 with the full (local) correlation as the
    local part.
    """
    if not 0.0 <= visibility <= 1.0:
        raise AttackError(f"visibility must lie in [0, 1], got {visibility!r}")
    ideal = werner_correlation(1.0, arrangement)
    if visibility <= local_visibility_value:
        return CCDecomposition(1.0, werner_correlation(visibility, arrangement), ideal)
    q = local_weight(visibility, local_visibility_value)
    return CCDecomposition(q, werner_correlation(local_visibility_value, arrangement), ideal)


def cc_chsh(theta: float, visibility: float) -> CCDecomposition:
    """Convex-combination split of the theta-protocol correlation, using the
    protocol-specific locality threshold 1/(cos theta + sin theta)."""
    return cc_werner(visibility, chsh_arrangement(theta), local_visibility(theta))


def unknown_symbol(scenario) -> int:
    """Index of the 'knows nothing' symbol in the side-information alphabet."""
    return scenario.k_a * scenario.k_b


def tripartite(decomposition: CCDecomposition, x: int, y: int) -> JointDistribution:
    """Joint distribution of the outcomes and the eavesdropper's variable.

    On local rounds the side information equals the outcome pair (encoded as
    k_b*a + b); on nonlocal rounds it is the unknown symbol.  The alphabet
    has k_a*k_b + 1 symbols.
    """
    scenario = decomposition.scenario
    k_a, k_b = scenario.k_a, scenario.k_b
    q = decomposition.local_weight
    p = np.zeros((k_a, k_b, k_a * k_b + 1))
    unknown = unknown_symbol(scenario)
    for a in range(k_a):
        for b in range(k_b):
            p[a, b, k_b * a + b] = q * decomposition.local.table[a, b, x, y]
            p[a, b, unknown] = (1.0 - q) * decomposition.nonlocal_part.table[a, b, x, y]
    return JointDistribution(p)


def ideal_agreement(arrangement: MeasurementArrangement, x: int, y: int) -> float:
    """Probability of equal outcomes at visibility 1 for the setting pair (x, y)."""
    return 0.5 * (1.0 - float(arrangement.alice[x] @ arrangement.bob[y]))


def eve_map(agreement: float, unknown_fraction: float) -> StochasticMap:
    """Relabelling of binary-outcome side information.

    When outcomes agree more often than not (agreement >= 1/2), matching
    pairs are kept and a fraction ``unknown_fraction`` of the mismatched
    pairs is merged into the unknown symbol; otherwise the roles of the
    matching and mismatched pairs are swapped.  The unknown symbol always
    maps to itself.
    """
    if not 0.0 <= unknown_fraction <= 1.0:
        raise AttackError(f"unknown_fraction must lie in [0, 1], got {unknown_fraction!r}")
    if not 0.0 <= agreement <= 1.0:
        raise AttackError(f"agreement must lie in [0, 1], got {agreement!r}")
    rows = np.zeros((5, 5))
    unknown = 4
    kept = (0, 3) if agreement >= 0.5 else (1, 2)
    merged = (1, 2) if agreement >= 0.5 else (0, 3)
    for e in kept:
        rows[e, e] = 1.0
    for e in merged:
        rows[e, unknown] = unknown_fraction
        rows[e, e] = 1.0 - unknown_fraction
    rows[unknown, unknown] = 1.0
    return StochasticMap(rows)


def zero_key_visibility(agreement: float, local_visibility_value: float) -> float:
    """Visibility threshold up to which the relabelling can zero the bound.

    Equals [v_local (2s - 1) + 1] / [v_local (1 - 2s) + 4s - 1] for the
    ideal agreement s of the setting pair; monotonically decreasing in s,
    so the key-generating pair (s = 1) is the most favorable to the
    eavesdropper.
    """
    if not 0.5 <= agreement <= 1.0:
        raise AttackError(f"agreement must lie in [1/2, 1], got {agreement!r}")
    if not 0.0 < local_visibility_value < 1.0:
        raise AttackError(
            f"local visibility must lie in (0, 1), got {local_visibility_value!r}"
        )
    v_l = local_visibility_value
    return (v_l * (2.0 * agreement - 1.0) + 1.0) / (v_l * (1.0 - 2.0 * agreement) + 4.0 * agreement - 1.0)


def solve_unknown_fraction(
    visibility: float, local_visibility_value: float, agreement: float
) -> float:
    """Fraction of mismatched local symbols to hide so the unknown branch
    carries zero mutual information.

    Solves (1-q) |2s-1| = fraction * q * (mass of the hidden local symbols)
    for the convex split with weight q at the given visibility.  Only
    solvable up to the zero-key visibility of the setting pair.
    """
    if not 0.0 <= visibility <= 1.0:
        raise AttackError(f"visibility must lie in [0, 1], got {visibility!r}")
    if not 0.0 <= agreement <= 1.0:
        raise AttackError(f"agreement must lie in [0, 1], got {agreement!r}")
    folded = max(agreement, 1.0 - agreement)
    if folded == 0.5:
        return 0.0
    threshold = zero_key_visibility(folded, local_visibility_value)
    if visibility > threshold + 1e-12:
        raise BalanceInfeasibleError(
            f"visibility {visibility} exceeds the zero-key threshold {threshold} "
            f"for agreement {agreement}"
        )
    q = local_weight(visibility, local_visibility_value)
    if q >= 1.0:
        return 0.0
    # probability of equal outcomes in the local part for this setting pair
    s_local = 0.5 * (1.0 - local_visibility_value * (1.0 - 2.0 * agreement))
    if agreement >= 0.5:
        fraction = (1.0 - q) * (2.0 * agreement - 1.0) / (q * (1.0 - s_local))
    else:
        fraction = (1.0 - q) * (1.0 - 2.0 * agreement) / (q * s_local)
    return float(min(max(fraction, 0.0), 1.0))


def keyrate_bound(observed: Correlation, attack: AttackModel) -> float:
    """Upper bound on the two-way key rate: the setting-weighted conditional
    mutual information after the eavesdropper's relabelling.

    The attack's mixture must reproduce the observed correlation entrywise.
    """
    mixture = attack.decomposition.mixture()
    if not mixture.allclose(observed, atol=MIXTURE_ATOL):
        raise AttackError("attack decomposition does not reproduce the observed correlation")
    total = 0.0
    for (x, y), weight in attack.setting_weights.items():
        if weight == 0.0:
            continue
        joint = tripartite(attack.decomposition, x, y)
        total += weight * conditional_mutual_information(apply_map(joint, attack.maps[(x, y)]))
    return total


def chsh_attack(theta: float, visibility: float, unknown_fraction="auto") -> AttackModel:
    """Standard attack on the theta protocol with all key rounds at the
    (x, y) = (0, 2) setting pair.

    ``unknown_fraction='auto'`` solves for the zeroing fraction and falls
    back to hiding every mismatched symbol when the visibility is above the
    zero-key threshold (any fraction still yields a valid upper bound).
    """
    decomposition = cc_chsh(theta, visibility)
    agreement = ideal_agreement(chsh_arrangement(theta), 0, 2)  # exactly 1
    if unknown_fraction == "auto":
        try:
            fraction = solve_unknown_fraction(visibility, local_visibility(theta), agreement)
        except BalanceInfeasibleError:
            fraction = 1.0
    else:
        fraction = float(unknown_fraction)
    return AttackModel(
        decomposition=decomposition,
        maps={(0, 2): eve_map(agreement, fraction)},
        setting_weights={(0, 2): 1.0},
    )


def chsh_keyrate_bound(theta: float, visibility: float) -> float:
    """Closed-form key-rate upper bound for the theta protocol keyed on the
    (0, 2) setting pair.

    Zero at and below the critical visibility; above it,
    2(1 - s q) + (1-q) log2[(1-q)/(2(1-sq))] + q(1-s) log2[q(1-s)/(2(1-sq))]
    with s = (1 + v_local)/2 and q = (1 - v)/(1 - v_local).
    """
    if not 0.0 <= visibility <= 1.0:
        raise AttackError(f"visibility must lie in [0, 1], got {visibility!r}")
    v_l = local_visibility(theta)
    if visibility <= critical_visibility(theta):
        return 0.0
    s = 0.5 * (1.0 + v_l)
    q = (1.0 - visibility) / (1.0 - v_l)
    z = 1.0 - s * q
    value = 2.0 * z + (1.0 - q) * math.log2((1.0 - q) / (2.0 * z))
    hidden = q * (1.0 - s)
    if hidden > 0.0:
        value += hidden * math.log2(hidden / (2.0 * z))
    return max(value, 0.0)


def critical_visibility_werner() -> float:
    """Critical visibility of the noisy-singlet family under arbitrary
    projective measurements: below it no setting-announcing protocol can
    extract a key, although the correlations are nonlocal above ~0.6964."""
    return zero_key_visibility(1.0, WERNER_LOCAL_VISIBILITY)


def critical_visibility(theta: float) -> float:
    """Critical visibility (v_local + 1)/(3 - v_local) of the theta protocol;
    strictly above the protocol's locality threshold for every theta."""
    return zero_key_visibility(1.0, local_visibility(theta))
