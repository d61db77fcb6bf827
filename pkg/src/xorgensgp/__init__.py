"""xorgens and xorgensGP pseudo-random number generators.

Serial and block/lane-parallel xorgens streams, baseline generators
(xorwow, MT19937), a desk-scale statistical battery and a throughput
harness.
"""

from .baselines import MT19937, Xorwow, raw_xorgens
from .core import (TINY_PARAMS, XORGENSGP_32, GeneratorParams, Xorgens, XorgensState,
                   lane_bound, make_params, next_word, period_description, seed_state,
                   step_linear, validate_params)
from .parallel import batch_step, create_ensemble, generate

__version__ = "0.1.0"

__all__ = ["MT19937", "Xorwow", "raw_xorgens", "TINY_PARAMS", "XORGENSGP_32",
           "GeneratorParams", "Xorgens", "XorgensState", "lane_bound", "make_params",
           "next_word", "period_description", "seed_state", "step_linear",
           "validate_params", "batch_step", "create_ensemble", "generate"]
