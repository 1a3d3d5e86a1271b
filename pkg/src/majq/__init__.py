"""Sampling and exact analysis of random permutations under the major-index law."""
from majq.qnum import (Permutation, QPoly, cycle_type, cycles, descent_set, inverse,
                       maj, prob_mass, q_binomial, q_factorial, q_int)
from majq.sampler import SamplerConfig, gamma, make_rng, sample_maj, sample_maj_batch

__version__ = "0.1.0"

__all__ = [
    "Permutation", "QPoly", "SamplerConfig", "cycle_type", "cycles", "descent_set",
    "gamma", "inverse", "maj", "make_rng", "prob_mass", "q_binomial", "q_factorial",
    "q_int", "sample_maj", "sample_maj_batch",
]
