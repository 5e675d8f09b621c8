import cmath
import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from usm import branchlib as bl
from usm.cli import identity_rows


class TestPrincipal:
    def test_classical_values(self):
        assert bl.principal("acos", 0.5).real == pytest.approx(math.pi / 3, abs=1e-15)
        assert bl.principal("asinh", 0) == 0
        r = bl.principal("sqrt", -0.75)
        assert r.real == 0 and r.imag == pytest.approx(math.sqrt(3) / 2, abs=1e-15)

    @pytest.mark.parametrize("tag", ["asec", "acsc", "log"])
    def test_excluded_points(self, tag):
        with pytest.raises(bl.ExcludedPointError):
            bl.principal(tag, 0)

    @given(st.floats(-1, 1))
    def test_real_ranges_inside(self, y):
        a, s = bl.acos(y), bl.asin(y)
        assert -1e-15 <= a.real <= math.pi + 1e-15 and abs(a.imag) < 1e-12
        assert abs(s.real) <= math.pi / 2 + 1e-15
        if abs(y) < 1:
            w = bl.sqrt(y * y - 1)
            assert w.imag >= 0 and abs(w.real) < 1e-15

    @given(st.floats(1, 1e6), st.sampled_from([1, -1]))
    def test_real_ranges_outside(self, m, sign):
        y = sign * m
        sec, csc = bl.asec(y).real, bl.acsc(y).real
        assert 0 <= sec <= math.pi and abs(sec - math.pi / 2) > 1e-9
        # acsc(-1) = asin(-1) = -pi/2 by the catalogue definition
        assert -math.pi / 2 <= csc <= math.pi / 2 and csc != 0

    @given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False))
    def test_against_mpmath(self, z):
        # mpmath is an independent implementation of the same principal branches
        # except on the cuts, which we avoid
        if abs(z.imag) < 1e-9:
            return
        pairs = [("log", mpmath.log), ("sqrt", mpmath.sqrt), ("asin", mpmath.asin), ("acos", mpmath.acos)]
        if abs(z.real) > 1e-9:  # atan cuts lie on the imaginary axis
            pairs.append(("atan", mpmath.atan))
        for tag, ref in pairs:
            got, want = bl.principal(tag, z), complex(ref(z))
            assert abs(got - want) <= 1e-12 * max(1, abs(want)), tag


class TestOracleValues:
    def test_thm1a_half(self):
        s = bl.thm1_sides(0.5, "A")
        assert abs(s.lhs - complex(0.5, -math.sqrt(3) / 2)) <= 1e-15 and s.abs_error <= 1e-15

    @pytest.mark.parametrize("y,val", [(1.25, 0.5), (-1.25, -0.5)])
    def test_thm1b_pythagorean(self, y, val):
        s = bl.thm1_sides(y, "B", "csc")
        assert abs(s.rhs - val) <= 1e-15 and s.abs_error <= 1e-15

    def test_thm2_examples(self):
        s = bl.thm2_sides(0.6, "A")
        assert abs(s.rhs - 1 / 3) <= 1e-15 and s.abs_error <= 1e-15
        s = bl.thm2_sides(1.0, "B")
        assert abs(s.lhs - 1) <= 1e-15 and abs(s.rhs - 1) <= 1e-15
        assert bl.thm2_sides(-0.6, "C").abs_error <= 1e-12

    @pytest.mark.parametrize("y,rhs", [(0.0, 1j), (0.75, 2j), (-0.75, 0.5j)])
    def test_bridge(self, y, rhs):
        s = bl.bridge_sides(y)
        assert abs(s.rhs - rhs) <= 1e-15 and s.abs_error <= 1e-15

    def test_domain_violations(self):
        with pytest.raises(bl.DomainViolation):
            bl.thm1_sides(2.0, "A")
        with pytest.raises(bl.DomainViolation):
            bl.thm1_sides(-1.0, "B", "sec")
        with pytest.raises(bl.DomainViolation):
            bl.thm2_sides(0.0, "A")
        with pytest.raises(bl.DomainViolation):
            bl.thm2_sides(0.5, "B")


class TestInvariants:
    @given(st.floats(-1, 1))
    def test_unit_modulus(self, y):
        assert abs(abs(cmath.exp(-1j * bl.acos(y))) - 1) <= 1e-14

    @given(st.floats(1, 1e4), st.sampled_from([1, -1]))
    def test_reciprocal_roots(self, m, sign):
        y = sign * m
        w = bl.sqrt(y * y - 1)
        assert abs((y - w) * (y + w) - 1) <= 1e-14 * max(1.0, y * y) * 4

    def test_sign_table_not_vacuous(self):
        swapped = abs(cmath.exp(-1j * bl.acos(2.0)) - bl._tan(bl.acsc(2.0) / 2))
        assert swapped >= 0.1

    @given(st.floats(1 + 1e-6, 100), st.sampled_from([1, -1]))
    def test_csc_and_sec_forms_agree(self, m, sign):
        y = sign * m
        a = bl.thm1_sides(y, "B", "csc")
        if abs(y + 1) < bl.SINGULAR_MARGIN:
            return
        b = bl.thm1_sides(y, "B", "sec")
        assert abs(a.rhs - b.rhs) <= 1e-12


@pytest.mark.parametrize("theorem", ["1a", "1b", "2a", "2b", "2c", "bridge"])
def test_identity_suites(theorem):
    rows = identity_rows(theorem, 2001)
    assert len(rows) >= 2001
    assert max(r[2] for r in rows) <= 1e-12
