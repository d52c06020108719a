from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from voa.fock import (
    Deriv, FockState, Gen, Lin, SystemError_, VAC, Wick, circle, get_system, identity_suite,
    parity, parse_system, state_of, weight_basis, wick,
)
from voa.randgen import random_triple, rng_for
from voa.w1inf import Realization, build_j, pi_project


def vac(sysm):
    return FockState.vacuum(sysm)


def count_pbw(w):
    # coefficient of q^w in prod_{l>=0} prod_{k>=l+1} 1/(1-q^k): the mode
    # J^l(-k) has weight k, and there are k of them (l = 0..k-1) per weight
    coeffs = [1] + [0] * w
    for k in range(1, w + 1):
        for _ in range(k):
            for i in range(k, w + 1):
                coeffs[i] += coeffs[i - k]
    return coeffs[w]


def test_weight_space_dimensions():
    M = get_system("current", -1)
    dims = [len(weight_basis(M, w)) for w in range(6)]
    assert dims == [1, 1, 3, 6, 13, 24]
    assert dims == [count_pbw(w) for w in range(6)]


def test_weight_nine_dimension():
    assert len(weight_basis(get_system("current", -2), 9)) == count_pbw(9) == 282


@pytest.mark.parametrize("c", [-1, -2, 3, Fraction(1, 2)])
def test_heisenberg_level(c):
    M = get_system("current", c)
    assert circle(M, Gen("J", 0), 1, Gen("J", 0)) == Fraction(c) * vac(M)
    assert circle(M, Gen("J", 0), 0, Gen("J", 0)).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_free_field_heisenberg(n):
    bg = Realization("betagamma", n=n)
    j0 = build_j(0, bg)
    assert circle(bg.system, j0, 1, j0) == -n * vac(bg.system)
    bc = Realization("bc", n=n)
    j0 = build_j(0, bc)
    assert circle(bc.system, j0, 1, j0) == n * vac(bc.system)


def test_free_field_ope():
    bg = get_system("betagamma", 1)
    assert circle(bg, Gen("beta", 0), 0, Gen("gamma", 0)) == vac(bg)
    assert circle(bg, Gen("gamma", 0), 0, Gen("beta", 0)) == -vac(bg)
    assert circle(bg, Gen("beta", 0), 0, Gen("beta", 0)).is_zero()
    bc = get_system("bc", 1)
    assert circle(bc, Gen("b", 0), 0, Gen("c", 0)) == vac(bc)
    assert circle(bc, Gen("c", 0), 0, Gen("b", 0)) == vac(bc)
    assert state_of(bc, Wick(Gen("c", 0), Gen("c", 0))).is_zero()


@pytest.mark.parametrize("l", range(0, 6))
def test_generation_lemma(l):
    M = get_system("current", -1)
    J = lambda i: Gen("J", i)
    assert circle(M, J(1), 0, J(l)) == -state_of(M, Deriv(1, J(l)))
    if l >= 1:
        rhs = state_of(M, Lin.of([(-(l + 1), J(l)), (2, Deriv(1, J(l - 1)))]))
        assert circle(M, J(2), 1, J(l - 1)) == rhs


def _hom_case(target, n, a, b, k):
    c = -n if target == "betagamma" else n
    M = get_system("current", c)
    real = Realization(target, n=n)
    lhs = pi_project(circle(M, Gen("J", a), k, Gen("J", b)), n, target)
    rhs = circle(real.system, build_j(a, real), k, build_j(b, real))
    return lhs == rhs


@given(st.integers(0, 3), st.integers(0, 3), st.integers(-2, 7), st.sampled_from([1, 2]))
def test_betagamma_is_homomorphism(a, b, k, n):
    assert _hom_case("betagamma", n, a, b, k)


@given(st.integers(0, 3), st.integers(0, 3), st.integers(-2, 7))
def test_bc_is_homomorphism(a, b, k):
    assert _hom_case("bc", 1, a, b, k)


SYSTEMS = [("current", -1), ("betagamma", 1), ("betagamma", 2), ("bc", 1)]


@pytest.mark.parametrize("kind,param", SYSTEMS)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(0, 3))
def test_identities_random(kind, param, seed, n):
    sysm = get_system(kind, param)
    a, b, c = random_triple(sysm, rng_for(seed))
    rep = identity_suite(sysm, a, b, c, n=n)
    assert rep["ok"], rep.get("witness")


def test_vacuum_is_identity_for_wick():
    M = get_system("current", -1)
    x = Wick(Gen("J", 1), Gen("J", 0))
    assert state_of(M, Wick(VAC, x)) == state_of(M, x)
    assert state_of(M, wick()) == vac(M)


def test_mode_of_derivative():
    M = get_system("current", -1)
    # (d a)(m) = -m a(m-1) on the vacuum: (dJ^0)(-1)|0> = J^0(-2)|0>
    st_ = state_of(M, Deriv(1, Gen("J", 0)))
    assert st_.terms == {((0, -2),): 1}


def test_state_errors():
    M = get_system("current", -1)
    B = get_system("betagamma", 1)
    with pytest.raises(SystemError_):
        vac(M) + vac(B)
    mixed = state_of(M, Gen("J", 0)) + vac(M)
    with pytest.raises(ValueError):
        mixed.weight
    with pytest.raises(SystemError_):
        parse_system("betagamma")
    with pytest.raises(SystemError_):
        parse_system("nope:1")


def test_normalized_and_parts():
    M = get_system("current", -1)
    v = 3 * state_of(M, Wick(Gen("J", 0), Gen("J", 0))) + 6 * state_of(M, Gen("J", 1))
    nv = v.normalized()
    assert nv.coeff(((0, -1), (0, -1))) == 1
    assert nv.part(1) == 2 * state_of(M, Gen("J", 1))
    assert v.degree == 2 and v.weight == 2


def test_mixed_parity_rejected():
    bc = get_system("bc", 1)
    e = Lin.of([(1, Gen("b", 0)), (1, Wick(Gen("b", 0), Gen("c", 0)))])
    with pytest.raises(ValueError):
        parity(bc, e)
    # inside a Wick product the sum is split, so evaluation still works
    lhs = state_of(bc, Wick(e, Gen("c", 0)))
    rhs = state_of(bc, Wick(Gen("b", 0), Gen("c", 0))) + state_of(
        bc, Wick(Wick(Gen("b", 0), Gen("c", 0)), Gen("c", 0)))
    assert lhs == rhs
