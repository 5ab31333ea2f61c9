"""Synthetic corpus generation with prescribed annotation statistics.

Builds a fully-populated demo corpus whose per-dimension entropies,
concentration indices, and pairwise Cramér's V associations land on a
requested profile. The default profile mirrors the production reference
corpus, so a fresh deployment (or the test suite) can exercise the
analytics and the adaptive loop without shipping the real dataset.

Construction: solve each dimension's marginal shares for its entropy and
concentration targets, couple the dimensions through a log-linear
interaction tensor fitted by iterative proportional fitting, tune the
interaction strengths until the pairwise associations match, then round to
integer cell counts (largest remainder) and materialize templated
challenges.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import minimize

from .corpus import BloomLevel, Challenge, Difficulty

DEFAULT_CATEGORIES = (
    "Machine Learning", "Deep Learning", "Transformers", "Generative AI",
    "Large Language Models", "Multimodal AI", "Data Science",
    "Natural Language Processing", "Computer Vision", "Reinforcement Learning",
    "Probability & Statistics", "Linear Algebra", "Optimization",
    "Neural Networks", "Feature Engineering", "Model Evaluation",
    "Time Series", "Recommender Systems", "Graph Learning",
    "Speech Processing", "AI Ethics", "MLOps", "Information Retrieval",
    "Bayesian Methods", "Clustering", "Dimensionality Reduction",
)


@dataclass(frozen=True)
class AnnotationProfile:
    """Target statistics for a synthesized corpus."""

    size: int
    categories: tuple[str, ...]
    category_entropy_bits: float
    category_concentration: float
    difficulty_entropy_bits: float
    difficulty_concentration: float
    bloom_entropy_bits: float
    bloom_concentration: float
    v_category_difficulty: float
    v_category_bloom: float
    v_difficulty_bloom: float


REFERENCE_PROFILE = AnnotationProfile(
    size=10_845,
    categories=DEFAULT_CATEGORIES,
    category_entropy_bits=4.051,
    category_concentration=0.044,
    difficulty_entropy_bits=1.866,
    difficulty_concentration=0.053,
    bloom_entropy_bits=2.546,
    bloom_concentration=0.011,
    v_category_difficulty=0.596,
    v_category_bloom=0.166,
    v_difficulty_bloom=0.172,
)


def _entropy_bits(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def _norm_herfindahl(p: np.ndarray, k: int) -> float:
    return float(((p * p).sum() - 1.0 / k) / (1.0 - 1.0 / k))


def _solve_marginal(k: int, h_target: float, c_target: float,
                    seed: int, floor: float = 0.002) -> np.ndarray:
    """Shares over k labels hitting the entropy/concentration pair.

    Every share stays above `floor` so no label rounds away to zero.
    """
    if not 0.0 <= h_target <= np.log2(k) or not 0.0 <= c_target <= 1.0:
        raise ValueError(
            f"targets infeasible for {k} labels: entropy {h_target} "
            f"(max {np.log2(k):.4f}), concentration {c_target}")
    rng = np.random.default_rng(seed)
    best_err, best_p = np.inf, None
    for attempt in range(60):
        z0 = rng.normal(0.0, 0.5 + 0.1 * attempt, size=k)

        def to_p(z):
            q = np.exp(z - z.max())
            q /= q.sum()
            return floor + (1.0 - k * floor) * q

        def loss(z):
            p = to_p(z)
            return ((_entropy_bits(p) - h_target) ** 2
                    + (_norm_herfindahl(p, k) - c_target) ** 2)

        result = minimize(loss, z0, method="Nelder-Mead",
                          options={"maxiter": 40000, "xatol": 1e-12, "fatol": 1e-20})
        if result.fun < best_err:
            best_err, best_p = result.fun, to_p(result.x)
        if best_err < 1e-16:
            break
    if best_err > 1e-10:
        raise ValueError(
            f"no {k}-label distribution found for entropy {h_target}, "
            f"concentration {c_target} (residual {best_err:.2e})")
    return best_p


def _ipf(base: np.ndarray, margins: list[np.ndarray],
         iters: int = 400, tol: float = 1e-12) -> np.ndarray:
    """Rescale `base` so each 1-way margin matches, preserving interactions."""
    t = base.copy()
    for _ in range(iters):
        worst = 0.0
        for axis, target in enumerate(margins):
            axes = tuple(i for i in range(t.ndim) if i != axis)
            current = t.sum(axis=axes)
            ratio = np.where(current > 0, target / np.maximum(current, 1e-300), 0.0)
            shape = [1] * t.ndim
            shape[axis] = -1
            t = t * ratio.reshape(shape)
            worst = max(worst, float(np.abs(current - target).max()))
        if worst < tol:
            break
    return t


def _cramers_v(table: np.ndarray) -> float:
    t = np.asarray(table, dtype=float)
    t = t[t.sum(axis=1) > 0][:, t.sum(axis=0) > 0]
    n = t.sum()
    expected = np.outer(t.sum(axis=1), t.sum(axis=0)) / n
    chi2 = ((t - expected) ** 2 / expected).sum()
    r, c = t.shape
    return float(np.sqrt(chi2 / (n * min(r - 1, c - 1))))


def _build_joint(pc: np.ndarray, pd: np.ndarray, pb: np.ndarray,
                 v_targets: np.ndarray, seed: int) -> np.ndarray:
    """Joint shares over (category, difficulty, bloom) with the target pairwise V."""
    rng = np.random.default_rng(seed)
    patterns = (
        rng.normal(size=(len(pc), len(pd)))[:, :, None],
        rng.normal(size=(len(pc), len(pb)))[:, None, :],
        rng.normal(size=(len(pd), len(pb)))[None, :, :],
    )
    margins = [pc, pd, pb]
    pairs = ((0, 1), (0, 2), (1, 2))

    def fit(strengths):
        base = np.exp(sum(s * a for s, a in zip(strengths, patterns)))
        joint = _ipf(base, margins)
        vs = np.array([_cramers_v(joint.sum(axis=tuple(k for k in range(3) if k not in pair)))
                       for pair in pairs])
        return joint, vs

    # Association strength is monotone in each interaction's scale, so a few
    # coordinate-wise bisection sweeps converge.
    strengths = np.array([1.0, 0.3, 0.3])
    joint, vs = fit(strengths)
    for _ in range(8):
        for idx in range(3):
            lo, hi = 0.0, 8.0
            for _ in range(40):
                strengths[idx] = (lo + hi) / 2
                _, vs = fit(strengths)
                if vs[idx] < v_targets[idx]:
                    lo = strengths[idx]
                else:
                    hi = strengths[idx]
            strengths[idx] = (lo + hi) / 2
        joint, vs = fit(strengths)
        if np.abs(vs - v_targets).max() < 2e-4:
            break
    if np.abs(vs - v_targets).max() > 2e-3:
        raise ValueError(f"association tuning did not converge: reached {vs}")
    return joint


def _integerize(shares: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding of share*total to integers summing to total."""
    flat = shares.ravel() * total
    counts = np.floor(flat).astype(np.int64)
    remainder = flat - counts
    counts[np.argsort(-remainder)[: total - counts.sum()]] += 1
    return counts.reshape(shares.shape)


_CONCEPTS = (
    "gradient descent", "regularization", "overfitting", "attention weights",
    "batch normalization", "cross-validation", "embedding spaces", "loss landscapes",
    "backpropagation", "tokenization", "feature scaling", "class imbalance",
    "learning-rate schedules", "residual connections", "latent variables",
    "posterior inference", "kernel functions", "precision-recall trade-offs",
    "sampling temperature", "weight decay", "positional encodings", "dropout",
    "convolution filters", "eigenvalue decomposition", "policy gradients",
    "vanishing gradients", "data augmentation", "margin maximization",
    "beam search", "quantization", "distribution shift", "calibration curves",
)

_PROBLEM_TEMPLATES: dict[BloomLevel, tuple[str, ...]] = {
    BloomLevel.REMEMBER: (
        "State the definition of {concept} as used in {category}.",
        "List the key components involved in {concept} within {category}.",
    ),
    BloomLevel.UNDERSTAND: (
        "Explain, in your own words, how {concept} behaves in {category} and why.",
        "Summarize the role {concept} plays in a typical {category} workflow.",
    ),
    BloomLevel.APPLY: (
        "Given a concrete {category} task, apply {concept} and describe each step you take.",
        "Use {concept} to improve a failing {category} pipeline, detailing your changes.",
    ),
    BloomLevel.ANALYZE: (
        "Break down how {concept} interacts with other choices in a {category} system, "
        "and identify the dominant effect.",
        "Compare two settings of {concept} in {category} and analyze when each wins.",
    ),
    BloomLevel.EVALUATE: (
        "Assess whether relying on {concept} is justified for a production {category} "
        "system, weighing the strongest argument against it.",
        "Judge the claim that {concept} is essential in {category}; defend your verdict.",
    ),
    BloomLevel.CREATE: (
        "Design a new approach that combines {concept} with another technique to "
        "advance {category}, and sketch how you would validate it.",
        "Propose an experiment that would reveal the limits of {concept} in {category}.",
    ),
}

_ANSWER_TEMPLATES = (
    "{concept} governs this case: {detail}, which is why it drives the outcome in "
    "{category}.",
    "The key is {concept} — {detail}. In {category} this determines both quality "
    "and stability.",
    "Start from {concept}: {detail}. Everything else in the {category} setting "
    "follows from that.",
)

_DETAILS = (
    "it trades bias against variance under the data budget",
    "it reshapes the optimization surface the model descends",
    "it controls how information propagates between layers",
    "it decides which patterns survive into the final representation",
    "it balances exploration of new structure against exploitation of known signal",
    "it couples the data distribution to the capacity of the model",
)


def _slug(text: str) -> str:
    return "".join(ch if ch.isalnum() else "-" for ch in text.lower()).strip("-")


def synthesize_corpus(profile: AnnotationProfile = REFERENCE_PROFILE,
                      seed: int = 0) -> list[Challenge]:
    """Deterministically generate challenges matching an annotation profile."""
    kc = len(profile.categories)
    pc = _solve_marginal(kc, profile.category_entropy_bits,
                         profile.category_concentration, seed=seed * 1000 + kc)
    pd = _solve_marginal(len(Difficulty), profile.difficulty_entropy_bits,
                         profile.difficulty_concentration, seed=seed * 1000 + 4)
    pb = _solve_marginal(len(BloomLevel), profile.bloom_entropy_bits,
                         profile.bloom_concentration, seed=seed * 1000 + 6)
    joint = _build_joint(pc, pd, pb, np.array([
        profile.v_category_difficulty,
        profile.v_category_bloom,
        profile.v_difficulty_bloom,
    ]), seed=seed * 1000 + 11)
    counts = _integerize(joint, profile.size)

    rng = np.random.default_rng(seed)
    difficulties = list(Difficulty)
    blooms = list(BloomLevel)
    challenges: list[Challenge] = []
    serial = 0
    for (ci, di, bi) in product(range(kc), range(len(difficulties)), range(len(blooms))):
        category = profile.categories[ci]
        difficulty = difficulties[di]
        bloom = blooms[bi]
        templates = _PROBLEM_TEMPLATES[bloom]
        for _ in range(int(counts[ci, di, bi])):
            serial += 1
            concept = _CONCEPTS[rng.integers(len(_CONCEPTS))]
            problem = templates[rng.integers(len(templates))].format(
                concept=concept, category=category)
            answer = _ANSWER_TEMPLATES[rng.integers(len(_ANSWER_TEMPLATES))].format(
                concept=concept, category=category,
                detail=_DETAILS[rng.integers(len(_DETAILS))])
            challenges.append(Challenge(
                id=f"q{serial:05d}",
                problem=problem,
                answer=answer,
                category=category,
                difficulty=difficulty,
                tags=(_slug(category), _slug(concept)),
                bloom_level=bloom,
            ))
    return challenges
