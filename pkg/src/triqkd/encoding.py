"""Users' (basis, bit) choices and pulse preparation.

Three users A, B1, B2 (indices 0, 1, 2) each pick a basis and a bit per
round and send a phase-encoded coherent pulse toward the measurement unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import optics

#: User indices and announcement names.
USERS = (0, 1, 2)
USER_NAMES = ("A", "B1", "B2")


class Basis(Enum):
    X = "X"
    Y = "Y"


# phase per (basis, bit): X carries 0 or pi, Y carries pi/2 or 3pi/2
_PHASES = {
    (Basis.X, 0): 0.0,
    (Basis.X, 1): math.pi,
    (Basis.Y, 0): math.pi / 2,
    (Basis.Y, 1): 3 * math.pi / 2,
}


@dataclass(frozen=True)
class EncodingChoice:
    """One user's random choice for a round."""

    basis: Basis
    bit: int

    def __post_init__(self) -> None:
        if self.bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {self.bit}")


def phase_of(choice: EncodingChoice) -> float:
    """Pulse phase induced by a (basis, bit) choice, in radians."""
    return _PHASES[(choice.basis, choice.bit)]


@dataclass(frozen=True)
class BasesTriplet:
    """The three users' bases for one round."""

    a: Basis
    b1: Basis
    b2: Basis

    @classmethod
    def from_label(cls, label: str) -> "BasesTriplet":
        """Parse a label like ``"XXY"`` (users A, B1, B2 in order)."""
        if len(label) != 3 or any(c not in "XY" for c in label):
            raise ValueError(f"triplet label must be 3 chars of X/Y, got {label!r}")
        return cls(Basis(label[0]), Basis(label[1]), Basis(label[2]))

    @property
    def label(self) -> str:
        return self.a.value + self.b1.value + self.b2.value

    def __iter__(self):
        return iter((self.a, self.b1, self.b2))


#: All 8 bases triplets, in binary order with X < Y.
ALL_TRIPLETS = tuple(
    BasesTriplet.from_label(a + b + c) for a in "XY" for b in "XY" for c in "XY"
)
MATCH_TRIPLETS = tuple(t for t in ALL_TRIPLETS if t.label in ("XXX", "YYY"))
MISMATCH_TRIPLETS = tuple(t for t in ALL_TRIPLETS if t not in MATCH_TRIPLETS)


@dataclass(frozen=True)
class TripletClass:
    """Classification of a bases triplet.

    For a mismatch exactly one pair shares a basis; ``matched_pair`` holds
    their user indices and ``unmatched_user`` the third index. Both are
    None when all three bases agree.
    """

    all_match: bool
    matched_pair: tuple[int, int] | None
    unmatched_user: int | None


def classify_triplet(t: BasesTriplet) -> TripletClass:
    """Identify the matched pair of a triplet, or flag an all-match."""
    bases = tuple(t)
    if bases[0] == bases[1] == bases[2]:
        return TripletClass(all_match=True, matched_pair=None, unmatched_user=None)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if bases[i] == bases[j]:
            return TripletClass(
                all_match=False, matched_pair=(i, j), unmatched_user=3 - i - j
            )
    raise AssertionError("unreachable: some pair must share a basis")


@dataclass(frozen=True)
class ChannelParams:
    """Link and detector imperfections.

    transmittance: per-user power transmittance of the fiber to the
        measurement unit, each in [0, 1].
    dark_count_prob: per-detector probability of a spurious click in a
        round, each in [0, 1). Applied at detection time, OR-ed with the
        signal click.

    The defaults reproduce the ideal setting (lossless links, no dark
    counts).
    """

    transmittance: tuple[float, float, float] = (1.0, 1.0, 1.0)
    dark_count_prob: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if len(self.transmittance) != 3 or len(self.dark_count_prob) != 3:
            raise ValueError("transmittance and dark_count_prob need one entry per user/detector")
        for eta in self.transmittance:
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"transmittance must be in [0, 1], got {eta}")
        for dark in self.dark_count_prob:
            if not 0.0 <= dark < 1.0:
                raise ValueError(f"dark count probability must be in [0, 1), got {dark}")

    @classmethod
    def uniform(cls, transmittance: float = 1.0, dark_count_prob: float = 0.0) -> "ChannelParams":
        """Same transmittance for every user and dark rate for every detector."""
        return cls((transmittance,) * 3, (dark_count_prob,) * 3)


def prepare_pulses(
    choices: Sequence[EncodingChoice],
    mu: float,
    channel: ChannelParams = ChannelParams(),
) -> np.ndarray:
    """Input amplitudes for one round, after channel loss.

    User u contributes magnitude sqrt(transmittance_u * mu) at the phase of
    their choice. Loss is applied as amplitude scaling before the
    interference unit (beam-splitter loss model).
    """
    if len(choices) != 3:
        raise ValueError(f"expected 3 encoding choices, got {len(choices)}")
    return np.array(
        [
            optics.make_coherent_amplitude(eta * mu, phase_of(choice))
            for choice, eta in zip(choices, channel.transmittance)
        ],
        dtype=np.complex128,
    )


def triplet_of(choices: Iterable[EncodingChoice]) -> BasesTriplet:
    """Bases triplet of a round's choices."""
    bases = [c.basis for c in choices]
    return BasesTriplet(*bases)
