from fractions import Fraction as F

import numpy as np
import pytest

from pertseries.family import (FamilyError, FamilySpec, OutOfRangeError, entries, load_family,
                               truncate, validate_growth)


def test_power_entries():
    q, b, c = entries(FamilySpec("power", F(1, 2)), 4)
    assert q == 16 and b == c == pytest.approx(2.0)


def test_alternating_weights():
    s = FamilySpec("alternating", 0)
    assert [entries(s, k)[1] for k in (1, 2, 3, 4)] == [1, 3, 1, 3]


def test_block2_couples_only_odd_to_even():
    s = FamilySpec("block2", 0)
    assert [entries(s, k)[1] for k in (1, 2, 3)] == [2, 0, 2]
    A = truncate(s, 1.0, 4).to_dense()
    assert A[1, 2] == 0 and A[0, 1] == 2


def test_truncate_shape_and_symmetry():
    m = truncate(FamilySpec("power", 1), 0.5, 5)
    assert m.N == 5 and m.is_real_symmetric()
    assert np.allclose(np.diag(m.to_dense()).real, [1, 4, 9, 16, 25])
    assert m.to_csv().splitlines()[0] == "row,col,re,im"


def test_errors():
    with pytest.raises(FamilyError):
        FamilySpec("power", 2)
    with pytest.raises(FamilyError):
        truncate(FamilySpec("power", 0), 0.1, 1)
    with pytest.raises(OutOfRangeError):
        entries(FamilySpec("power", 0), 0)
    with pytest.raises(FamilyError):
        FamilySpec("custom", 0, M=1, table=((1, 2),), extension="zero")


@pytest.mark.parametrize("kind", ["power", "alternating", "block2"])
@pytest.mark.parametrize("alpha", [0, F(1, 2), F(3, 2)])
def test_default_growth_constant_holds(kind, alpha):
    assert validate_growth(FamilySpec(kind, alpha), 200)


def test_mpmath_entries(mp128):
    _, b, _ = entries(FamilySpec("power", F(1, 2)), 2, mp128)
    assert abs(b ** 2 - 2) < mp128.mpf(2) ** -120


def test_custom_family_from_config(tmp_path):
    (tmp_path / "t.txt").write_text("# b, c\n1, 1\n2, 2\n")
    (tmp_path / "f.cfg").write_text("kind=custom\nalpha=1\nM=3\nextension=k**alpha\ntable=t.txt\n")
    s = load_family(tmp_path / "f.cfg")
    assert entries(s, 2)[1] == 2 and entries(s, 5)[1] == pytest.approx(5)


def test_extension_formula_is_sandboxed():
    with pytest.raises(FamilyError):
        FamilySpec("custom", 0, M=1, extension="__import__('os')")
