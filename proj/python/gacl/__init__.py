"""Colony-learning / neural-network workbench (python bindings)."""

import json as _json

from ._core import (
    __version__,
    choice_probabilities,
    dataset_names,
    expected_fitness,
    experiment_names,
    run_colony,
    train_mlp,
)
from ._core import run_experiment_json as _run_experiment_json


def run_experiment(name, seed=42, replicates=0, overrides=None, data_dir="",
                   csv_out_dir=""):
    """Run a named experiment and return its result metadata as a dict."""
    return _json.loads(
        _run_experiment_json(name, seed, replicates, overrides or {},
                             data_dir, csv_out_dir))


__all__ = [
    "__version__",
    "choice_probabilities",
    "dataset_names",
    "expected_fitness",
    "experiment_names",
    "run_colony",
    "run_experiment",
    "train_mlp",
]
