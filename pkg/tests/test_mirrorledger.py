import json
from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from clarke_mirror import fixtures
from clarke_mirror.mirrorledger import (
    BLedger,
    BSymbol,
    MirrorGeneratorSet,
    NotComputable,
    clarke_sum,
    coarsenings,
    contraction,
    derive_hdual,
    grouped_sum,
    grouped_target,
    labeled_target,
    numeric_mirror_check,
    toric_sum,
    verify_binomial_identities,
    verify_certificate_json,
)

B2 = ((1,), (2,))
B3 = ((1,), (2,), (3,))


def atoms(n):
    return tuple((i,) for i in range(1, n + 1))


def symbols(n=4):
    def build(labels, s):
        minus = [(i + 1,) for i, t in enumerate(labels) if t == 0]
        zero = [(i + 1,) for i, t in enumerate(labels) if t == 1]
        plus = [(i + 1,) for i, t in enumerate(labels) if t == 2]
        return BSymbol(minus, zero, plus, Fraction(s, 2))

    return st.builds(build, st.lists(st.integers(0, 2), min_size=1, max_size=n), st.integers(-2, 2))


def ledgers():
    return st.lists(st.tuples(symbols(), st.integers(-3, 3)), max_size=5).map(BLedger)


def test_contraction_examples():
    sym = BSymbol([(3,)], [(1,), (2,), (4,)], [])
    out = contraction(sym)
    assert out.zero == ((1, 2, 4),)
    assert out.shift == 1
    assert out.weight == sym.weight
    assert contraction(BSymbol([], [(1,)], [(2,)])) == BSymbol([], [(1,)], [(2,)])
    with pytest.raises(ValueError):
        contraction(BSymbol([(1,)], [], []))


def test_symbol_validation_and_json():
    with pytest.raises(ValueError):
        BSymbol([(1,)], [(1,)], [])
    with pytest.raises(ValueError):
        BSymbol([(1,)], [], [], Fraction(1, 3))
    sym = BSymbol([(1,)], [(2, 3)], [(4,)], Fraction(1, 2))
    assert BSymbol.from_json(sym.to_json()) == sym
    assert str(sym) == "B[{1},{2+3},{4}](1/2)"


@given(symbols())
def test_weight_is_contraction_invariant(sym):
    assert sym.canonical().weight == sym.weight
    assert sym.swapped().swapped() == sym


@given(ledgers(), ledgers(), ledgers())
def test_ledger_is_a_rational_vector_space(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a - a).is_zero()
    assert a.scale(2) == a + a
    assert a.shifted(Fraction(1, 2)).shifted(Fraction(-1, 2)) == a
    assert BLedger.from_json(json.loads(json.dumps(a.to_json()))) == a


def test_k2_worked_combination():
    combo = clarke_sum(B2, B2) - clarke_sum(B2, [(1,)])
    expected = BLedger(
        [
            (BSymbol([], [(1,), (2,)], []), 1),
            (BSymbol([(1,), (2,)], [], []), 1),
            (BSymbol([(2,)], [(1,)], []), -1),
            (BSymbol([(1,)], [(2,)], []), -1),
        ]
    )
    assert combo == expected
    assert toric_sum(B2) == grouped_target(B2, 2, 0) + labeled_target([(1,)], [(2,)])
    assert grouped_target(B2, 1, 1) == labeled_target([(1,)], [(2,)]).scale(2)


def test_k3_worked_combination_is_three_x_minus_y():
    s_empty = clarke_sum(B3, B3)
    assert len(s_empty) == 8
    singles = [clarke_sum(B3, [x for x in B3 if x != i]) for i in B3]
    combo = s_empty.scale(3) - singles[0] - singles[1] - singles[2]
    X = grouped_target(B3, 3, 0)
    Y = grouped_target(B3, 2, 1)
    assert combo == X.scale(3) - Y
    assert combo != X - Y


def test_grouped_sums_match_clarke_sums():
    assert grouped_sum(3, 0) == clarke_sum(B3, B3)
    assert grouped_sum(3, 1) == sum((clarke_sum(B3, [x for x in B3 if x != i]) for i in B3), BLedger())
    with pytest.raises(ValueError):
        grouped_sum(3, 2)


@pytest.mark.parametrize("k", range(2, 9))
def test_binomial_identities(k):
    rep = verify_binomial_identities(k)
    assert rep.passed and rep.t_lemma
    assert rep.case == ("even" if k % 2 == 0 else "odd")


def test_coarsenings_are_bell_numbers():
    assert [len(coarsenings(atoms(n))) for n in range(1, 6)] == [1, 2, 5, 15, 52]


def test_hdual_small_cases():
    der = derive_hdual(3)
    assert der.verified
    assert der.unconditional_up_to() == 3
    labels = [c.label for c in der.certificates]
    assert labels == [
        "n=2 (2,0)",
        "n=2 (1,1)",
        "n=3 (3,0)",
        "n=3 (2,1)",
        "n=3 labeled {2,3},{1}",
        "n=3 labeled {1,3},{2}",
        "n=3 labeled {1,2},{3}",
    ]
    labeled = der.certificates[-1]
    assert labeled.target == labeled_target([(1,), (2,)], [(3,)])
    assert not labeled.conditional(der.generators)
    terms = labeled.to_json(der.generators)["terms"]
    assert ["1", "clarke[1|2|3;stack={3}]", "0"] in terms
    assert ["1/4", "toric[1|2|3]", "0"] in terms


def test_hdual_certificates_reverify_from_json():
    der = derive_hdual(5)
    doc = json.loads(json.dumps(der.to_json()))
    assert doc["unconditional_up_to"] == 4
    assert doc["hypotheses"]
    for cert in doc["certificates"]:
        assert verify_certificate_json(cert)
    tampered = dict(doc["certificates"][1])
    tampered["terms"] = [[str(Fraction(c) * 2), g, s] for c, g, s in tampered["terms"]]
    assert not verify_certificate_json(tampered)


def test_hdual_bounds():
    with pytest.raises(ValueError):
        derive_hdual(1)
    with pytest.raises(ValueError):
        derive_hdual(9)


def _sympy_in_span(gens, target):
    (w,) = target.weights()
    cols = []
    for g in gens.generators.values():
        (gw,) = g.ledger.weights()
        cols.append(g.ledger.shifted(Fraction(w - gw, 2)))
    syms = sorted({s for c in cols for s in c.terms} | set(target.terms))
    A = sympy.Matrix([[c.terms.get(s, 0) for c in cols] for s in syms])
    b = sympy.Matrix([target.terms.get(s, 0) for s in syms])
    return A.rank() == A.row_join(b).rank()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_span_route_agrees_with_sympy_rank(n):
    gens = MirrorGeneratorSet()
    gens.geometric_closure(atoms(n))
    assert len(gens) == {2: 8, 3: 27, 4: 109}[n]
    blocks = atoms(n)
    targets = [grouped_target(blocks, n - b, b) for b in range(n // 2 + 1)]
    targets.append(labeled_target(blocks[:-1], blocks[-1:]))
    for t in targets:
        cert = gens.membership(t)
        assert (cert is not None) == _sympy_in_span(gens, t)
        if cert is not None:
            assert cert.verify(gens)


def test_labeled_three_one_is_outside_the_span():
    gens = MirrorGeneratorSet()
    gens.geometric_closure(atoms(4))
    assert gens.membership(labeled_target(atoms(4)[:3], atoms(4)[3:])) is None
    assert gens.membership(labeled_target(atoms(4)[:2], atoms(4)[2:])) is not None


def test_replay_agrees_with_span_for_grouped_targets():
    der = derive_hdual(4)
    gens = MirrorGeneratorSet()
    gens.geometric_closure(atoms(4))
    for cert in der.certificates:
        if cert.label.startswith("n=4"):
            assert gens.membership(cert.target) is not None


def test_numeric_mirror_check_examples():
    np1 = fixtures.segment_nef(1)
    assert numeric_mirror_check(BLedger(), np1).passed
    assert numeric_mirror_check(toric_sum(atoms(1)), np1).passed
    assert numeric_mirror_check(clarke_sum(atoms(1), atoms(1)), np1).passed
    square = fixtures.square_axis_nef()
    rep = numeric_mirror_check(toric_sum(B2), square)
    assert rep.passed and rep.d == 2 and rep.weight == 2
    assert "PASS" in rep.table()


def test_numeric_mirror_check_rejects_a_lone_symbol():
    rep = numeric_mirror_check(BLedger.of(BSymbol([(1,)], [], [])), fixtures.segment_nef(1))
    assert not rep.passed


def test_numeric_mirror_check_input_errors():
    np1 = fixtures.segment_nef(1)
    with pytest.raises(ValueError):
        numeric_mirror_check(toric_sum(B2), np1)
    mixed = BLedger.of(BSymbol([(1,)], [], []), BSymbol([(1,)], [], [], 1))
    with pytest.raises(ValueError):
        numeric_mirror_check(mixed, np1)
    square = fixtures.square_axis_nef()
    with pytest.raises(NotComputable):
        numeric_mirror_check(BLedger.of(BSymbol([(1, 2)], [], [])), square)


@given(st.integers(2, 3), st.data())
def test_membership_is_monotone_in_generators(n, data):
    gens = MirrorGeneratorSet()
    ids = gens.geometric_closure(atoms(n))
    subset = data.draw(st.lists(st.sampled_from(ids), unique=True))
    target = grouped_target(atoms(n), n, 0)
    small = gens.membership(target, subset)
    if small is not None:
        assert gens.membership(target) is not None


def test_grouped_target_size():
    for n in range(2, 6):
        for b in range(n // 2 + 1):
            t = grouped_target(atoms(n), n - b, b)
            assert sum(t.terms.values()) == 2 * comb(n, b)
