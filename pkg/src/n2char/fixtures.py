"""Versioned default inputs: evaluation points, sample arguments and tolerances."""
from __future__ import annotations

import json
import random
from functools import lru_cache
from importlib import resources

from .specfun import ModularPoint

FIXTURE_VERSION = 1


def _c(pair) -> complex:
    return complex(pair[0], pair[1])


@lru_cache(maxsize=None)
def load_fixture() -> dict:
    data = json.loads(resources.files("n2char").joinpath("data/standard_points.json").read_text())
    if data.get("version") != FIXTURE_VERSION:
        raise RuntimeError(f"fixture version {data.get('version')} does not match {FIXTURE_VERSION}")
    return data


def point_from(rec: dict) -> ModularPoint:
    return ModularPoint(_c(rec["tau"]), _c(rec["u"]), _c(rec.get("t", (0, 0))))


def standard_points() -> list[ModularPoint]:
    return [point_from(rec) for rec in load_fixture()["points"]]


def atypical_point() -> ModularPoint:
    return point_from(load_fixture()["atypical_point"])


def tolerance(check: str) -> float:
    return float(load_fixture()["tolerances"][check])


def appell_sample() -> tuple[complex, complex, complex]:
    rec = load_fixture()["appell_s"]
    return _c(rec["u"]), _c(rec["v"]), _c(rec["tau"])


def denominator_points() -> list[tuple[complex, complex]]:
    return [(_c(rec["u"]), _c(rec["tau"])) for rec in load_fixture()["denominator_points"]]


def random_points(n: int, seed: int) -> list[ModularPoint]:
    """Im tau in [0.6, 1.2], |Re tau| <= 0.3, |u| <= 0.3, t = 0; deterministic in seed."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        tau = complex(rng.uniform(-0.3, 0.3), rng.uniform(0.6, 1.2))
        u = complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))
        out.append(ModularPoint(tau, u, 0))
    return out
