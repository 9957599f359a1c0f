"""Trial records, binomial estimates and verdicts."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from scipy.stats import binomtest

OUTCOMES = {
    "quf_forge": ("win", "reject"),
    "quf_cheat": ("cheat", "reject"),
    "qcca2_test": ("win", "fail"),
    "qcca2_fake": ("cheat", "reject"),
    "qae_real": ("real", "ideal"),
    "qae_ideal": ("real", "ideal"),
    "uf_forge": ("win", "reject"),
    "uf_cheat": ("cheat", "reject"),
    "ae_real": ("real", "ideal"),
    "ae_ideal": ("real", "ideal"),
    "cca2_test": ("win", "fail"),
    "cca2_fake": ("cheat", "reject"),
}

SECURE_MAX = 0.05
BROKEN_MIN = 0.25


@dataclass
class TrialRecord:
    game: str
    outcome: str
    seed: int
    enc_queries: int = 0
    dec_queries: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        allowed = OUTCOMES.get(self.game)
        if allowed is not None and self.outcome not in allowed:
            raise ValueError(f"outcome {self.outcome!r} not in {allowed} for {self.game}")

    @property
    def success(self) -> bool:
        return self.outcome == OUTCOMES[self.game][0]

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ProbEstimate:
    trials: int
    successes: int
    p_hat: float
    ci_lo: float
    ci_hi: float

    @classmethod
    def from_counts(cls, successes: int, trials: int, confidence: float = 0.95) -> "ProbEstimate":
        if trials <= 0:
            raise ValueError("trials must be positive")
        ci = binomtest(successes, trials).proportion_ci(confidence, method="exact")
        return cls(trials, successes, successes / trials, float(ci.low), float(ci.high))

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.ci_lo, self.ci_hi)


@dataclass(frozen=True)
class AdvantageEstimate:
    """Difference of two success probabilities with a conservative interval
    (the difference of the two Clopper-Pearson intervals' endpoints)."""

    value: float
    ci_lo: float
    ci_hi: float
    first: ProbEstimate
    second: ProbEstimate
    signed: bool = False

    @classmethod
    def difference(cls, a: ProbEstimate, b: ProbEstimate, signed: bool = False
                   ) -> "AdvantageEstimate":
        d = a.p_hat - b.p_hat
        lo, hi = a.ci_lo - b.ci_hi, a.ci_hi - b.ci_lo
        if signed:
            return cls(d, lo, hi, a, b, True)
        if d < 0:
            d, lo, hi = -d, -hi, -lo
        return cls(d, max(lo, 0.0), hi, a, b, False)


def verdict(advantage: float, secure_max: float = SECURE_MAX, broken_min: float = BROKEN_MIN) -> str:
    """``secure`` at or below ``secure_max``, ``broken`` at or above ``broken_min``,
    ``inconclusive`` in between."""
    if advantage <= secure_max:
        return "secure"
    if advantage >= broken_min:
        return "broken"
    return "inconclusive"
