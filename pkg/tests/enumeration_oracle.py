"""Independent enumeration oracle for the closed-form curve tests.

Everything here is rebuilt from scratch on purpose: the rotation comes
from scipy's expm instead of the closed-form axis formula, and the
protocol tables are plain dicts typed in by hand. Tests compare the
library against these functions so a shared bug in one construction
path cannot hide in both.
"""

import itertools
import math

import numpy as np
from scipy.linalg import expm

LX = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
LY = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
LZ = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

PHASE = {("X", 0): 0.0, ("X", 1): math.pi,
         ("Y", 0): math.pi / 2, ("Y", 1): 3 * math.pi / 2}

TRIPLETS = ["".join(t) for t in itertools.product("XY", repeat=3)]
MISMATCH = ["XXY", "XYX", "XYY", "YXX", "YXY", "YYX"]
MATCH = ["XXX", "YYY"]

# matched pair per mismatch triplet; user indices 0=A, 1=B1, 2=B2
PAIR_OF = {"XXY": (0, 1), "YYX": (0, 1), "YXY": (0, 2), "XYX": (0, 2),
           "XYY": (1, 2), "YXX": (1, 2)}
ADMISSIBLE = {"XXY": (0, 1), "YYX": (0, 1), "YXY": (2, 3), "XYX": (2, 3),
              "XYY": (4, 5), "YXX": (4, 5), "XXX": (0, 1), "YYY": (0, 1)}
TYPE_PATTERN = {0: (1, 2), 1: (0,), 2: (0, 2), 3: (1,), 4: (2,), 5: (0, 1)}

# per-user bit flips keyed by (triplet class, detection type)
FLIPS = {
    ("mm01", 0): (0, 0, 0), ("mm01", 1): (0, 1, 0),
    ("mm02", 2): (0, 0, 0), ("mm02", 3): (0, 0, 1),
    ("mm12", 4): (0, 0, 0), ("mm12", 5): (0, 0, 1),
    ("match", 0): (0, 1, 1), ("match", 1): (0, 1, 0),
    ("match", 3): (0, 0, 1), ("match", 4): (0, 0, 0),
}

PAIRS = [(0, 1), (0, 2), (1, 2)]

BITS = list(itertools.product((0, 1), repeat=3))


def iu_matrix(sx=1.0, sy=1.0, sz=1.0):
    a = math.pi / 4
    return expm(sx * a * LX) @ expm(sy * a * LY) @ expm(sz * a * LZ)


_R = iu_matrix()


def clazz(label):
    if label in MATCH:
        return "match"
    return {(0, 1): "mm01", (0, 2): "mm02", (1, 2): "mm12"}[PAIR_OF[label]]


def expected_type(label, bits):
    a, b1, b2 = bits
    if label in MATCH:
        if b1 != a and b2 != a:
            return 0
        if b1 != a and b2 == a:
            return 1
        if b1 == a and b2 != a:
            return 3
        return 4
    i, j = PAIR_OF[label]
    lo, hi = ADMISSIBLE[label]
    return lo if bits[i] == bits[j] else hi


def output_amplitudes(label, bits, mu):
    alpha = np.array([math.sqrt(mu) * np.exp(1j * PHASE[(label[u], bits[u])])
                      for u in range(3)])
    return _R @ alpha


def pattern_probability(beta, pattern):
    p = 1.0
    for i in range(3):
        pf = 1.0 - math.exp(-abs(beta[i]) ** 2)
        p *= pf if i in pattern else (1.0 - pf)
    return p


def scenario_roundlevel(label, mu):
    """Per-round (p_correct, p_wrong) with encodings uniform over 8."""
    pc = pw = 0.0
    for bits in BITS:
        beta = output_amplitudes(label, bits, mu)
        want = expected_type(label, bits)
        for ty in ADMISSIBLE[label]:
            p = pattern_probability(beta, TYPE_PATTERN[ty])
            if ty == want:
                pc += p / 8
            else:
                pw += p / 8
    return pc, pw


def match_conditional(mu):
    """All-match curve with correct/wrong averaged per contributing combo.

    correct averages P(observed == expected) over the four type-0/1
    encodings; wrong averages the twelve cross terms where an encoding
    of one class produces the click pattern of a kept type it does not
    belong to.
    """
    pc_terms, pw_terms = [], []
    for bits in BITS:
        beta = output_amplitudes("XXX", bits, mu)
        want = expected_type("XXX", bits)
        p0 = pattern_probability(beta, TYPE_PATTERN[0])
        p1 = pattern_probability(beta, TYPE_PATTERN[1])
        if want == 0:
            pc_terms.append(p0)
            pw_terms.append(p1)
        elif want == 1:
            pc_terms.append(p1)
            pw_terms.append(p0)
        else:
            pw_terms.extend([p0, p1])
    return float(np.mean(pc_terms)), float(np.mean(pw_terms))


def bits_after_flips(label, bits, observed):
    f = FLIPS[(clazz(label), observed)]
    return tuple(b ^ fl for b, fl in zip(bits, f))


def pair_overall(pair, mu):
    """Bit-level (p_correct, p_wrong) for one pair over all 64 rounds."""
    pc = pw = 0.0
    for label in TRIPLETS:
        for bits in BITS:
            if label not in MATCH and PAIR_OF[label] != pair:
                continue
            beta = output_amplitudes(label, bits, mu)
            for ty in ADMISSIBLE[label]:
                p = pattern_probability(beta, TYPE_PATTERN[ty]) / 64.0
                rb = bits_after_flips(label, bits, ty)
                if rb[pair[0]] == rb[pair[1]]:
                    pc += p
                else:
                    pw += p
    return pc, pw


def overall(mu):
    """(p_correct, p_wrong) averaged over the three pairs."""
    vals = [pair_overall(p, mu) for p in PAIRS]
    return (sum(v[0] for v in vals) / 3.0, sum(v[1] for v in vals) / 3.0)


def mismatch_average(mu):
    vals = [scenario_roundlevel(t, mu) for t in MISMATCH]
    return (sum(v[0] for v in vals) / 6.0, sum(v[1] for v in vals) / 6.0)


def discard_fractions(mu):
    """Per-user P(basis matched nobody | valid click pattern)."""
    num = np.zeros(3)
    den = 0.0
    valid = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
    for label in TRIPLETS:
        for bits in BITS:
            beta = output_amplitudes(label, bits, mu)
            for pattern in valid:
                p = pattern_probability(beta, pattern) / 64.0
                den += p
                if label not in MATCH:
                    i, j = PAIR_OF[label]
                    num[3 - i - j] += p
    return num / den


def basis_overlap_fidelity(mu):
    """Tr(rho_X rho_Y) / Tr(rho_X^2) for the two-state basis ensembles."""
    return math.exp(-2 * mu) / ((1 + math.exp(-4 * mu)) / 2)
