"""CSV matrices and JSON instance descriptors.

A matrix CSV holds one matrix row per line, comma separated. An instance
descriptor is a JSON object::

    {
      "X": "data.csv",                       # or "generator": {...}
      "lambda1": 1.0,
      "lambda2": 1.0,
      "neighbor_count": 2,
      "seed": 0
    }

``"generator"`` accepts ``{"n": int, "m": int, "distribution": "normal" |
"uniform", "seed": int}``; when its seed is omitted the top-level seed is
used. Relative paths resolve against the descriptor's directory.
"""

import json
from pathlib import Path

import numpy as np

from .spectral import DataSet


def read_matrix_csv(path):
    path = Path(path)
    try:
        X = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except OSError as exc:
        raise OSError(f"cannot read matrix CSV {path}: {exc}") from exc
    except ValueError as exc:
        raise ValueError(f"malformed matrix CSV {path}: {exc}") from exc
    return X


def write_matrix_csv(path, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    with open(path, "w") as fh:
        for row in X:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def generate_matrix(n, m, distribution="normal", seed=None):
    rng = np.random.default_rng(seed)
    if distribution == "normal":
        return rng.standard_normal((n, m))
    if distribution == "uniform":
        return rng.uniform(-1.0, 1.0, size=(n, m))
    raise ValueError(f"unknown generator distribution {distribution!r}")


def load_instance(path_or_dict, base_dir=None):
    """Build a :class:`~qaop.spectral.DataSet` from a descriptor file or dict."""
    if isinstance(path_or_dict, dict):
        desc = path_or_dict
        base = Path(base_dir) if base_dir is not None else Path.cwd()
    else:
        path = Path(path_or_dict)
        try:
            desc = json.loads(path.read_text())
        except OSError as exc:
            raise OSError(f"cannot read instance descriptor {path}: {exc}") from exc
        base = path.parent

    missing = {"lambda1", "lambda2", "neighbor_count"} - desc.keys()
    if missing:
        raise KeyError(f"instance descriptor lacks {sorted(missing)}")
    if ("X" in desc) == ("generator" in desc):
        raise KeyError("instance descriptor needs exactly one of 'X' or 'generator'")

    if "X" in desc:
        xpath = Path(desc["X"])
        if not xpath.is_absolute():
            xpath = base / xpath
        X = read_matrix_csv(xpath)
    else:
        gen = dict(desc["generator"])
        X = generate_matrix(
            int(gen["n"]),
            int(gen["m"]),
            gen.get("distribution", "normal"),
            gen.get("seed", desc.get("seed")),
        )
    return DataSet(
        X=X,
        lambda1=float(desc["lambda1"]),
        lambda2=float(desc["lambda2"]),
        neighbor_count=int(desc["neighbor_count"]),
    )
