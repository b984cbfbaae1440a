"""Cross-validated choice of (m, nu_est, h) with a held-out log-likelihood."""

import logging
import math
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from deconvsim.adaptation.noise import (
    convolve_densities,
    density_at,
    estimate_noise_density,
)
from deconvsim.estimator.cf_model import truncate
from deconvsim.estimator.density import EstimatorParams
from deconvsim.estimator.ecf import PairedSample
from deconvsim.exceptions import (
    DeconvError,
    NumericalFailureError,
    ParameterDomainError,
)
from deconvsim.utils.common import derive_rng, run_parallel

logger = logging.getLogger("deconvsim")

MIN_CV_SAMPLE = 81
MIN_BLOCK = 10

CvTable = Dict[Tuple[EstimatorParams, float], float]


class CvConfig(BaseModel):
    """Candidates, block proportions and the log-likelihood floor."""

    model_config = ConfigDict(frozen=True)

    candidate_params: List[EstimatorParams]
    split_e1: float = Field(0.4, gt=0, lt=1)
    split_e2: float = Field(0.4, gt=0, lt=1)
    floor_eps: float = Field(1e-8, gt=0)
    seed: int = Field(0, ge=0)
    q_limit: float = Field(50.0, gt=0)
    cf_floor: float = Field(0.05, gt=0)
    noise_points: int = Field(1001, ge=2)

    @model_validator(mode="after")
    def check_config(self):
        if not self.candidate_params:
            raise ValueError("candidate_params must not be empty")
        if len(set(self.candidate_params)) != len(self.candidate_params):
            raise ValueError("candidate_params contains duplicates")
        if self.split_e1 + self.split_e2 >= 1:
            raise ValueError("E1 and E2 proportions must leave a test block")
        return self


class CvSplit(NamedTuple):
    """Fitting block E1, noise block E2 and test block T."""

    e1: np.ndarray
    e2: np.ndarray
    test: np.ndarray


def q_grid(n: int) -> np.ndarray:
    """k / (4 pi) for every positive integer k with k^4 <= n."""
    if n < MIN_CV_SAMPLE:
        raise ParameterDomainError(
            f"cross-validation needs n >= {MIN_CV_SAMPLE}, got {n}"
        )
    k = 1
    while (k + 1) ** 4 <= n:
        k += 1
    return np.arange(1, k + 1) / (4.0 * math.pi)


def split_indices(n: int, cfg: CvConfig) -> CvSplit:
    """Shuffles 0..n-1 under the seed and cuts it into E1, E2 and T."""
    order = derive_rng(cfg.seed, 0).permutation(n)
    n1 = int(round(cfg.split_e1 * n))
    n2 = int(round(cfg.split_e2 * n))
    split = CvSplit(order[:n1], order[n1 : n1 + n2], order[n1 + n2 :])
    if min(len(block) for block in split) < MIN_BLOCK:
        raise ParameterDomainError(
            f"every block needs >= {MIN_BLOCK} observations, got "
            f"{[len(block) for block in split]}"
        )
    return split


def noise_window(sample: PairedSample, points: int) -> np.ndarray:
    """
    Symmetric grid for noise densities. eps1 - eps2 = Y1 - Y2 has twice the
    noise variance, which sets the width.
    """
    noise_sd = float(np.std(sample.y1 - sample.y2)) / math.sqrt(2.0)
    half_width = max(6.0 * noise_sd, 1.0)
    return np.linspace(-half_width, half_width, points)


def log_likelihood(test: PairedSample, p1, p2, floor_eps: float) -> float:
    """sum over T of log p1(Y1) + log p2(Y2), densities floored at floor_eps."""
    first = np.maximum(density_at(p1, test.y1), floor_eps)
    second = np.maximum(density_at(p2, test.y2), floor_eps)
    return float(np.sum(np.log(first)) + np.sum(np.log(second)))


def cross_validate(
    sample: PairedSample,
    cfg: CvConfig,
    pipeline,
    eval_grid,
    quad_points: int = 4096,
    workers: int = 1,
) -> Tuple[EstimatorParams, CvTable]:
    """
    For each candidate H: fit on E1, estimate both noise densities on E2 for
    every q, convolve and score on T. Returns argmax over H of max over q and
    the full (H, q) table; failed candidates score -inf.
    """
    qs = q_grid(sample.n)
    split = split_indices(sample.n, cfg)
    fit_block = sample.subset(split.e1)
    noise_block = sample.subset(split.e2)
    test_block = sample.subset(split.test)
    noise_grid = noise_window(noise_block, cfg.noise_points)

    def score(own, params: EstimatorParams) -> List[float]:
        try:
            f_hat, fit = own.run(fit_block, params, eval_grid)
            phi_hat = truncate(fit.phi_hat, params.m)
            scores = []
            for q in qs:
                noise = [
                    estimate_noise_density(
                        noise_block,
                        phi_hat,
                        coordinate,
                        q,
                        noise_grid,
                        q_limit=cfg.q_limit,
                        cf_floor=cfg.cf_floor,
                        quad_points=quad_points,
                    )
                    for coordinate in (1, 2)
                ]
                p1, p2 = (convolve_densities(f_hat, g) for g in noise)
                scores.append(log_likelihood(test_block, p1, p2, cfg.floor_eps))
            return scores
        except (DeconvError, ValueError) as e:
            logger.warning(f"CV candidate {params} failed: {e}")
            return [-math.inf] * len(qs)

    # one private pipeline per fit key; candidates differing only in h reuse its fit
    groups: Dict[Tuple[float, int], List[EstimatorParams]] = {}
    for params in cfg.candidate_params:
        groups.setdefault(pipeline.fit_key(params), []).append(params)

    def score_group(members: List[EstimatorParams]) -> List[List[float]]:
        own = pipeline.spawn()
        return [score(own, params) for params in members]

    grouped = run_parallel(
        score_group, list(groups.values()), workers=workers, prefer="threads"
    )
    by_params = {
        params: scores
        for members, member_scores in zip(groups.values(), grouped)
        for params, scores in zip(members, member_scores)
    }
    results = [by_params[params] for params in cfg.candidate_params]

    table: CvTable = {}
    best: Optional[EstimatorParams] = None
    best_score = -math.inf
    for params, scores in zip(cfg.candidate_params, results):
        for q, value in zip(qs, scores):
            table[(params, float(q))] = value
        if best is None or max(scores) > best_score:
            best, best_score = params, max(scores)

    if best_score == -math.inf:
        raise NumericalFailureError("every cross-validation candidate failed")
    logger.info(f"CV selected {best} (score {best_score:.4f}).")
    return best, table


def cv_frame(table: CvTable) -> pd.DataFrame:
    """The table as rows m,nu_est,h,q,cv."""
    return pd.DataFrame(
        [
            {"m": p.m, "nu_est": p.nu_est, "h": p.h, "q": q, "cv": value}
            for (p, q), value in table.items()
        ],
        columns=["m", "nu_est", "h", "q", "cv"],
    )
