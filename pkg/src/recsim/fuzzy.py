"""One-input one-output Mamdani fuzzy system decoded from a 30-gene vector.

Both universes are [0, 1] with a five-term partition (VeryLow..VeryHigh):
shoulder trapezoids at the edges, triangles inside. Each membership function
is shaped by two genes; five rule weights and five consequent genes complete
the genome. Inference is min implication (scaled by the rule weight), max
aggregation, centroid defuzzification on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TERM_LABELS = ("VeryLow", "Low", "Medium", "High", "VeryHigh")

GAMMA0 = 0.25         # default right foot of the VeryLow shoulder
THETA0 = 0.75         # default anchor of the VeryHigh shoulder
DEFAULT_L_TR = 0.2    # inner-triangle base length; five terms tile [0,1] evenly
DEFAULT_RESOLUTION = 1001
MIN_TRIANGLE_HALF_WIDTH = 1e-6

# Default inner-triangle peaks for the even tiling; feet sit l_tr/2 either side.
_INNER_CENTERS = (0.25, 0.50, 0.75)


@dataclass(frozen=True)
class Trapezoid:
    """Membership function with nodes a <= b <= c <= d; 1 on [b, c], 0 outside [a, d].

    Zero-width edges behave as steps, so shoulders carry membership 1 at the
    domain boundary.
    """

    a: float
    b: float
    c: float
    d: float

    def membership(self, x: float) -> float:
        if x < self.a or x > self.d:
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        if x <= self.c:
            return 1.0
        return (self.d - x) / (self.d - self.c)

    def membership_many(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        out[(x >= self.b) & (x <= self.c)] = 1.0
        if self.b > self.a:
            rising = (x >= self.a) & (x < self.b)
            out[rising] = (x[rising] - self.a) / (self.b - self.a)
        if self.d > self.c:
            falling = (x > self.c) & (x <= self.d)
            out[falling] = (self.d - x[falling]) / (self.d - self.c)
        return out

    def nodes(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


def membership_grid(x: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Trapezoid membership with broadcast node arrays (batch path).

    `x` broadcasts against `nodes[..., i]`; zero-width edges act as steps,
    matching Trapezoid.membership.
    """
    a, b, c, d = (nodes[..., i] for i in range(4))
    rise_w = b - a
    fall_w = d - c
    rise = np.where(rise_w > 0, (x - a) / np.where(rise_w > 0, rise_w, 1.0),
                    np.where(x >= b, np.inf, -np.inf))
    fall = np.where(fall_w > 0, (d - x) / np.where(fall_w > 0, fall_w, 1.0),
                    np.where(x <= c, np.inf, -np.inf))
    return np.clip(np.minimum(np.minimum(rise, fall), 1.0), 0.0, 1.0)


def fis_gene_bounds(l_tr: float = DEFAULT_L_TR) -> list[tuple[float, float]]:
    """Per-gene bounds of the 30-gene vector.

    Layout: 10 input shape genes (g', g'' per term, VeryLow..VeryHigh), the
    same 10 for the output term set, 5 rule weights in [0, 1], 5 consequent
    genes in [0, 5] whose floor selects the consequent term.
    """
    shoulder = [(0.04, 4.00), (0.01, 0.99)]
    inner = [(0.01, 1.0 / l_tr), (0.01, 1.99)]
    term_set = shoulder + inner * 3 + shoulder
    return term_set * 2 + [(0.0, 1.0)] * 5 + [(0.0, 5.0)] * 5


@dataclass(frozen=True)
class FisGenome:
    genes: tuple[float, ...]
    l_tr: float = DEFAULT_L_TR

    def __post_init__(self):
        if len(self.genes) != 30:
            raise ValueError(f"genome must have 30 genes, got {len(self.genes)}")
        if not (0 < self.l_tr <= 0.5):
            raise ValueError(f"l_tr must be in (0, 0.5], got {self.l_tr}")


def _sanitize(raw: tuple[float, ...], widen: bool) -> tuple[float, ...]:
    # Clamp to the universe, restore ordering, and give near-degenerate
    # triangles a minimal support so the centroid grid can see them.
    vals = sorted(min(1.0, max(0.0, v)) for v in raw)
    if widen and vals[3] - vals[0] < 2 * MIN_TRIANGLE_HALF_WIDTH:
        mid = 0.5 * (vals[0] + vals[3])
        lo = max(0.0, mid - MIN_TRIANGLE_HALF_WIDTH)
        hi = min(1.0, lo + 2 * MIN_TRIANGLE_HALF_WIDTH)
        return (lo, mid, mid, hi)
    return tuple(vals)


def _decode_term_set(genes: list[float], l_tr: float) -> tuple[Trapezoid, ...]:
    terms = []
    # VeryLow shoulder: plateau [0, beta], falls to zero at gamma.
    gamma = genes[0] * GAMMA0
    beta = genes[1] * gamma
    terms.append(Trapezoid(*_sanitize((0.0, 0.0, beta, gamma), widen=False)))
    # Inner triangles: g' shifts the left foot, g'' the right foot and peak.
    for i, center in enumerate(_INNER_CENTERS):
        g1, g2 = genes[2 + 2 * i], genes[3 + 2 * i]
        phi0 = center - l_tr / 2.0
        xi0 = center + l_tr / 2.0
        phi = phi0 - (g1 * l_tr / 2.0 - l_tr / 2.0)
        xi = xi0 + (g2 * l_tr / 2.0 - l_tr / 2.0)
        omega = phi + g2 * (xi - phi) / 2.0
        terms.append(Trapezoid(*_sanitize((phi, omega, omega, xi), widen=True)))
    # VeryHigh shoulder: rises from theta, plateau [lambda, 1].
    theta = genes[8] * (1.0 - THETA0)
    lam = theta + genes[9] * (1.0 - theta)
    terms.append(Trapezoid(*_sanitize((theta, lam, 1.0, 1.0), widen=False)))
    return tuple(terms)


@dataclass
class FisModel:
    """Decoded Mamdani system: five rules, one per input term, shared output set."""

    input_terms: tuple[Trapezoid, ...]
    output_terms: tuple[Trapezoid, ...]
    consequents: tuple[int, ...]   # output term index per rule
    weights: tuple[float, ...]
    zero_activation_count: int = 0
    _samples: dict = field(default_factory=dict, repr=False, compare=False)

    def consequent_samples(self, resolution: int = DEFAULT_RESOLUTION
                           ) -> tuple[np.ndarray, np.ndarray]:
        """Uniform output grid and each rule's consequent sampled on it (cached)."""
        cached = self._samples.get(resolution)
        if cached is None:
            grid = np.linspace(0.0, 1.0, resolution)
            samples = np.stack([self.output_terms[ci].membership_many(grid)
                                for ci in self.consequents])
            cached = (grid, samples)
            self._samples[resolution] = cached
        return cached

    def rule_strengths(self, soe: float) -> np.ndarray:
        return np.array([term.membership(soe) * w
                         for term, w in zip(self.input_terms, self.weights)])

    def describe(self) -> str:
        lines = []
        for i, (ci, w) in enumerate(zip(self.consequents, self.weights)):
            lines.append(f"If SoE is {TERM_LABELS[i]} then alpha is "
                         f"{TERM_LABELS[ci]} ({w:.2f})")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "input_terms": {TERM_LABELS[i]: list(t.nodes())
                            for i, t in enumerate(self.input_terms)},
            "output_terms": {TERM_LABELS[i]: list(t.nodes())
                             for i, t in enumerate(self.output_terms)},
            "rules": [
                {"antecedent": TERM_LABELS[i], "consequent": TERM_LABELS[ci],
                 "weight": w}
                for i, (ci, w) in enumerate(zip(self.consequents, self.weights))
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FisModel":
        input_terms = tuple(Trapezoid(*d["input_terms"][lab]) for lab in TERM_LABELS)
        output_terms = tuple(Trapezoid(*d["output_terms"][lab]) for lab in TERM_LABELS)
        rules = d["rules"]
        if len(rules) != 5 or [r["antecedent"] for r in rules] != list(TERM_LABELS):
            raise ValueError("model must carry five rules, one per input term")
        consequents = tuple(TERM_LABELS.index(r["consequent"]) for r in rules)
        weights = tuple(float(r["weight"]) for r in rules)
        return cls(input_terms, output_terms, consequents, weights)


def decode(genome: FisGenome) -> FisModel:
    """Decode a 30-gene vector into a fuzzy model; rejects out-of-bounds genes."""
    bounds = fis_gene_bounds(genome.l_tr)
    for i, (g, (lo, hi)) in enumerate(zip(genome.genes, bounds)):
        if not (lo - 1e-12 <= g <= hi + 1e-12):
            raise ValueError(f"gene {i} = {g} outside [{lo}, {hi}]")
    genes = list(genome.genes)
    input_terms = _decode_term_set(genes[0:10], genome.l_tr)
    output_terms = _decode_term_set(genes[10:20], genome.l_tr)
    weights = tuple(genes[20:25])
    consequents = tuple(min(int(math.floor(g)), 4) for g in genes[25:30])
    return FisModel(input_terms, output_terms, consequents, weights)


def infer(model: FisModel, soe: float, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Crisp decision fraction for one SoE value.

    Zero total activation (a genome whose terms leave coverage gaps) returns
    the neutral 0.5 and bumps the model's diagnostic counter.
    """
    if not (0.0 <= soe <= 1.0):
        raise ValueError(f"soe must be in [0, 1], got {soe}")
    grid, samples = model.consequent_samples(resolution)
    strengths = model.rule_strengths(soe)
    agg = np.minimum(strengths[:, None], samples).max(axis=0)
    denom = agg.sum()
    if denom <= 0.0:
        model.zero_activation_count += 1
        return 0.5
    return float(agg @ grid / denom)


def infer_many(model: FisModel, soes: np.ndarray,
               resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
    """Vectorized `infer` over a 1-D array of SoE values."""
    soes = np.asarray(soes, dtype=float)
    if soes.min() < 0.0 or soes.max() > 1.0:
        raise ValueError("soe values must be in [0, 1]")
    grid, samples = model.consequent_samples(resolution)
    mus = np.stack([t.membership_many(soes) for t in model.input_terms], axis=-1)
    strengths = mus * np.asarray(model.weights)
    agg = np.minimum(strengths[..., None], samples).max(axis=-2)
    denom = agg.sum(axis=-1)
    zero = denom <= 0.0
    model.zero_activation_count += int(zero.sum())
    return np.where(zero, 0.5, (agg @ grid) / np.where(zero, 1.0, denom))


def symmetric_genome(l_tr: float = DEFAULT_L_TR) -> FisGenome:
    """Genome whose decoded model is mirror-symmetric about 0.5 (test anchor)."""
    term_set = [1.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, 0.5]
    weights = [1.0] * 5
    consequents = [0.5, 1.5, 2.5, 3.5, 4.5]
    return FisGenome(tuple(term_set * 2 + weights + consequents), l_tr)
