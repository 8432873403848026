"""Achievable rates of multihop virtual full-duplex relay channels.

Instances, configurations and results use the same JSON shapes as the
``vfdrelay`` command-line tool, passed here as plain dicts.
"""

import json

from . import _vfdrelay
from ._vfdrelay import (
    gaussian_rate,
    mutual_information,
    schedule_throughput,
    wyner_ziv_noise,
    wyner_ziv_rate,
)

__version__ = _vfdrelay.__version__

__all__ = [
    "evaluate",
    "optimize",
    "baseline",
    "sweep",
    "dm_solve",
    "dm_constraints",
    "mutual_information",
    "gaussian_rate",
    "wyner_ziv_noise",
    "wyner_ziv_rate",
    "schedule_throughput",
]


def evaluate(instance, config=None):
    """Rate breakdown of one mode configuration on one instance."""
    return json.loads(_vfdrelay.evaluate(json.dumps(instance), json.dumps(config or {})))


def optimize(instance, search=None):
    """Best QMF set and splits, with per-set rates."""
    return json.loads(_vfdrelay.optimize(json.dumps(instance), json.dumps(search or {})))


def baseline(instance, kind, decoder="sd", variant="printed", noise_level_floor=1.0, stage_depth_c=1.0):
    """One of optimized_qmf, noise_level_qmf, stage_depth_qmf, pure_df, hop_bound."""
    return json.loads(
        _vfdrelay.baseline(json.dumps(instance), kind, decoder, variant, noise_level_floor, stage_depth_c)
    )


def sweep(ensemble=None, k_list=(1, 2, 3, 4), schemes=(), decoder="jd", variant="printed", workers=1):
    """Monte Carlo sweep. Returns the per-trial and summary CSV text plus metadata."""
    return _vfdrelay.sweep(json.dumps(ensemble or {}), list(k_list), list(schemes), decoder, variant, workers)


def dm_solve(spec, modes, decoder="sd"):
    """Largest symmetric rate of a finite-alphabet network."""
    return json.loads(_vfdrelay.dm_solve(json.dumps(spec), json.dumps(modes), decoder))


def dm_constraints(spec, modes, distortions):
    """Constraint values at fixed quantizer knobs, one {stage: knob} dict per path."""
    d = [{int(k): float(v) for k, v in path.items()} for path in distortions]
    return json.loads(_vfdrelay.dm_constraints(json.dumps(spec), json.dumps(modes), d))
