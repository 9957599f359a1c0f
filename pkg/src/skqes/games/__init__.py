"""Security experiments, adversaries, reductions and estimators.

``GAMES`` maps a game id to its trial function ``run(scheme, adversary, seed,
max_queries=None) -> TrialRecord``.  :func:`estimate` repeats a game with seeds
``base_seed + i``; the ``*_advantage`` helpers combine the two games of a notion.
"""
from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

from .adversaries import QUANTUM_ADVERSARIES, make_adversary
from .classical import (CLASSICAL_ADVERSARIES, ClassicalView, exact_tag_forgery_bound,
                        run_ae_ideal, run_ae_real, run_cca2_fake, run_cca2_test,
                        run_uf_cheat, run_uf_forge, tag_acceptance)
from .quantum import (run_qae_ideal, run_qae_real, run_qcca2_fake, run_qcca2_test,
                      run_quf_cheat, run_quf_forge)
from .records import (BROKEN_MIN, OUTCOMES, SECURE_MAX, AdvantageEstimate, ProbEstimate,
                      TrialRecord, verdict)
from .reductions import TRANSFORMERS
from .runtime import ProtocolViolation, QueryBudgetExceeded

GAMES: dict[str, Callable] = {
    "quf_forge": run_quf_forge,
    "quf_cheat": run_quf_cheat,
    "qcca2_test": run_qcca2_test,
    "qcca2_fake": run_qcca2_fake,
    "qae_real": run_qae_real,
    "qae_ideal": run_qae_ideal,
    "uf_forge": run_uf_forge,
    "uf_cheat": run_uf_cheat,
    "ae_real": run_ae_real,
    "ae_ideal": run_ae_ideal,
    "cca2_test": run_cca2_test,
    "cca2_fake": run_cca2_fake,
}

# the two games behind each notion, and whether the advantage is signed
NOTIONS: dict[str, tuple[str, str, bool]] = {
    "quf": ("quf_forge", "quf_cheat", False),
    "qcca2": ("qcca2_test", "qcca2_fake", True),
    "qae": ("qae_real", "qae_ideal", False),
    "uf": ("uf_forge", "uf_cheat", False),
    "ae": ("ae_real", "ae_ideal", False),
    "cca2": ("cca2_test", "cca2_fake", True),
}

# state inherited by forked workers (scheme and adversary objects hold closures
# and need not be picklable)
_JOB: tuple | None = None


def _run_range(bounds: tuple[int, int]) -> list[TrialRecord]:
    game, scheme, adversary, max_queries = _JOB
    return [GAMES[game](scheme, adversary, s, max_queries=max_queries) for s in range(*bounds)]


def run_trials(game: str, scheme, adversary: Callable, trials: int, base_seed: int = 0,
               max_queries: int | None = None, jobs: int = 1) -> list[TrialRecord]:
    """Records of ``trials`` runs with seeds ``base_seed .. base_seed + trials - 1``,
    in seed order regardless of ``jobs``."""
    global _JOB
    if game not in GAMES:
        raise KeyError(f"unknown game {game!r}")
    if trials <= 0:
        raise ValueError("trials must be positive")
    if jobs <= 1 or trials < 2 * jobs:
        run = GAMES[game]
        return [run(scheme, adversary, base_seed + i, max_queries=max_queries)
                for i in range(trials)]
    step = -(-trials // (4 * jobs))
    chunks = [(base_seed + i, base_seed + min(i + step, trials))
              for i in range(0, trials, step)]
    _JOB = (game, scheme, adversary, max_queries)
    try:
        with ProcessPoolExecutor(jobs, mp_context=mp.get_context("fork")) as pool:
            return [rec for part in pool.map(_run_range, chunks) for rec in part]
    finally:
        _JOB = None


def summarize(records: list[TrialRecord]) -> ProbEstimate:
    return ProbEstimate.from_counts(sum(r.success for r in records), len(records))


def estimate(game: str, scheme, adversary: Callable, trials: int, base_seed: int = 0,
             max_queries: int | None = None, jobs: int = 1) -> ProbEstimate:
    """Probability of the game's first outcome (win / cheat / real) with an exact
    Clopper-Pearson interval."""
    return summarize(run_trials(game, scheme, adversary, trials, base_seed, max_queries, jobs))


def advantage(notion: str, scheme, adversary: Callable, trials: int, base_seed: int = 0,
              max_queries: int | None = None, jobs: int = 1) -> AdvantageEstimate:
    """Advantage for ``notion`` (``quf``, ``qcca2``, ``qae``, ``uf``, ``ae``,
    ``cca2``).  Both games reuse the same seeds."""
    first, second, signed = NOTIONS[notion]
    a = estimate(first, scheme, adversary, trials, base_seed, max_queries, jobs)
    b = estimate(second, scheme, adversary, trials, base_seed, max_queries, jobs)
    return AdvantageEstimate.difference(a, b, signed=signed)


def quf_advantage(scheme, adversary, trials, base_seed=0, max_queries=None, jobs=1):
    """``|P[forge -> win] - P[cheat -> cheat]|``; ``max_queries`` bounds the queries."""
    return advantage("quf", scheme, adversary, trials, base_seed, max_queries, jobs)


def qcca2_advantage(scheme, adversary, trials, base_seed=0, max_queries=None, jobs=1):
    """Signed ``P[test -> win] - P[fake -> cheat]`` (never clamped)."""
    return advantage("qcca2", scheme, adversary, trials, base_seed, max_queries, jobs)


def qae_advantage(scheme, adversary, trials, base_seed=0, max_queries=None, jobs=1):
    """``|P[real world -> real] - P[ideal world -> real]|``."""
    return advantage("qae", scheme, adversary, trials, base_seed, max_queries, jobs)


def uf_advantage(scheme, adversary, trials, base_seed=0, max_queries=None, jobs=1):
    return advantage("uf", scheme, adversary, trials, base_seed, max_queries, jobs)


def ae_advantage(scheme, adversary, trials, base_seed=0, max_queries=None, jobs=1):
    return advantage("ae", scheme, adversary, trials, base_seed, max_queries, jobs)


__all__ = [
    "GAMES", "NOTIONS", "OUTCOMES", "SECURE_MAX", "BROKEN_MIN",
    "TrialRecord", "ProbEstimate", "AdvantageEstimate", "verdict",
    "ProtocolViolation", "QueryBudgetExceeded", "ClassicalView",
    "run_trials", "summarize", "estimate", "advantage",
    "quf_advantage", "qcca2_advantage", "qae_advantage", "uf_advantage", "ae_advantage",
    "make_adversary", "QUANTUM_ADVERSARIES", "CLASSICAL_ADVERSARIES", "TRANSFORMERS",
    "tag_acceptance", "exact_tag_forgery_bound",
    "run_quf_forge", "run_quf_cheat", "run_qcca2_test", "run_qcca2_fake",
    "run_qae_real", "run_qae_ideal", "run_uf_forge", "run_uf_cheat",
    "run_ae_real", "run_ae_ideal", "run_cca2_test", "run_cca2_fake",
]
