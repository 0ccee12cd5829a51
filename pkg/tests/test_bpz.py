import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from n2char.bpz import (
    check_virasoro_unitarity,
    kac_table,
    minimal_character,
    virasoro_s,
    virasoro_s_matrix,
)
from n2char.errors import DomainError
from n2char.spectra import KacLabel, LevelPair

COPRIME_12 = [LevelPair(p, pp) for p in range(2, 13) for pp in range(1, 25) if math.gcd(p, pp) == 1]
SMALL = [lv for lv in COPRIME_12 if lv.p * lv.pp <= 35 and lv.pp >= 2]


def test_kac_table_examples():
    assert kac_table(LevelPair(3, 2)) == [KacLabel(1, 1)]
    assert kac_table(LevelPair(7, 1)) == []
    assert len(kac_table(LevelPair(5, 3))) == 4


@pytest.mark.parametrize("level", COPRIME_12, ids=str)
def test_kac_table_size(level):
    assert len(kac_table(level)) == (level.p - 1) * (level.pp - 1) // 2


def test_kac_table_brute_force():
    for level in COPRIME_12[:40]:
        brute = sorted(
            (m, n)
            for m in range(0, level.p + 1)
            for n in range(0, level.pp + 1)
            if 1 <= m <= level.p - 1 and 1 <= n <= level.pp - 1 and m * level.pp + n * level.p <= level.p * level.pp
        )
        assert [tuple(k) for k in kac_table(level)] == brute


def test_trivial_minimal_character_is_one():
    # c = 0 at (3,2): chi_{1,1} = 1, leading exponent (rp'-sp)^2/4pp' - 1/24 = 0
    assert abs(minimal_character(LevelPair(3, 2), (1, 1), 1j) - 1) < 1e-13
    assert abs(minimal_character(LevelPair(3, 2), (1, 1), 0.3 + 0.7j) - 1) < 1e-12


def test_minimal_character_series_oracle():
    # (5,2), chi_{1,1}: q^{-c/24} = q^{11/60} times prod_{n = +-2 mod 5} (1-q^n)^{-1}
    level, tau = LevelPair(5, 2), 0.1 + 0.8j
    q = cmath.exp(2j * math.pi * tau)
    rr = 1
    for n in range(1, 400):
        if n % 5 in (2, 3):
            rr /= 1 - q**n
    want = cmath.exp(2j * math.pi * tau * (11 / 60)) * rr
    assert abs(minimal_character(level, (1, 1), tau) - want) < 1e-12


taus = st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.4, 1.5))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SMALL), taus, st.data())
def test_minimal_character_t_phase_and_symmetry(level, tau, data):
    r, s = data.draw(st.sampled_from(kac_table(level)))
    phase = cmath.exp(2j * math.pi * ((r * level.pp - s * level.p) ** 2 / (4 * level.p * level.pp) - 1 / 24))
    chi = minimal_character(level, (r, s), tau)
    assert abs(minimal_character(level, (r, s), tau + 1) - phase * chi) < 1e-10 * max(1, abs(chi))
    assert abs(minimal_character(level, (level.p - r, level.pp - s), tau) - chi) < 1e-12 * max(1, abs(chi))


def test_minimal_character_bound():
    ev = minimal_character(LevelPair(4, 3), (1, 1), 0.5j, return_bound=True)
    assert ev.tail_bound < 1e-12


def test_virasoro_s_examples():
    assert abs(virasoro_s(LevelPair(3, 2), (1, 1), (1, 1)) - 1) < 1e-15
    with pytest.raises(DomainError):
        virasoro_s(LevelPair(3, 2), (2, 1), (1, 1))


def test_virasoro_unitarity_examples():
    assert check_virasoro_unitarity(LevelPair(3, 2)) <= 1e-14
    assert check_virasoro_unitarity(LevelPair(4, 3)) <= 1e-12
    assert check_virasoro_unitarity(LevelPair(5, 3)) <= 1e-12
    assert check_virasoro_unitarity(LevelPair(5, 1)) == 0.0


@pytest.mark.parametrize("level", SMALL, ids=str)
def test_virasoro_s_real_symmetric_involutive(level):
    mat = virasoro_s_matrix(level)
    assert np.array_equal(mat, mat.T)
    assert np.isrealobj(mat)
    assert np.max(np.abs(mat @ mat - np.eye(len(mat)))) <= 1e-12
