import math

import pytest
from hypothesis import given, settings, strategies as st

from spdcsim.elements import (
    Crystal,
    Misalignment,
    ModeShifter,
    MultimodeCrystal,
    PhaseShifter,
    Relabel,
    apply_crystal,
    apply_misalignment,
    apply_mode_shift,
    apply_multimode_crystal,
    apply_phase_shift,
    apply_relabel,
    resolve_loss_paths,
)
from spdcsim.fock import ModeLabel, StateVector, vacuum

from conftest import basis, label


def test_crystal_coupling_validation():
    with pytest.raises(ValueError):
        Crystal(label("a:0"), label("b:0"), g=0.0)
    with pytest.raises(ValueError):
        Crystal(label("a:0"), label("b:0"), g=0.6)
    with pytest.warns(UserWarning):
        Crystal(label("a:0"), label("b:0"), g=0.3)


def test_crystal_first_order_pair():
    c = Crystal(label("a:0"), label("b:0"), g=0.1)
    out = apply_crystal(vacuum(), c, default_order=1)
    assert out.amplitude({label("a:0"): 0}) == 1  # vacuum survives
    assert out.amplitude({label("a:0"): 1, label("b:0"): 1}) == pytest.approx(0.1)


def test_crystal_second_order_double_emission_oracle():
    # Hand expansion: (g^2/2) (a^dag b^dag)^2 |vac> = (g^2/2) * 2 |2,2>,
    # because each squared raising operator contributes sqrt(2).
    g = 0.1
    c = Crystal(label("a:0"), label("b:0"), g=g)
    out = apply_crystal(vacuum(), c, default_order=2)
    amp = out.amplitude({label("a:0"): 2, label("b:0"): 2})
    assert amp == pytest.approx(g * g, abs=1e-15)


def test_two_crystals_product_amplitude():
    g = 0.1
    c1 = Crystal(label("a:0"), label("b:0"), g=g)
    c2 = Crystal(label("c:0"), label("d:0"), g=g)
    out = apply_crystal(apply_crystal(vacuum(), c1), c2)
    amp = out.amplitude({label(p): 1 for p in ("a:0", "b:0", "c:0", "d:0")})
    assert amp == pytest.approx(g * g, abs=1e-15)


def test_crystal_expansion_includes_lowering_terms():
    # Pure emission on a seeded pair leaves the vacuum amplitude alone;
    # the full expansion feeds the pair back into it at first order.
    g = 0.1
    c = Crystal(label("a:0"), label("b:0"), g=g)
    pair = basis("a:0 b:0")
    full = apply_crystal(pair, c, default_order=1)
    emission_only = apply_crystal(pair, c, default_order=1, creation_only=True)
    assert full.amplitude({}) == pytest.approx(-g)
    assert emission_only.amplitude({}) == 0


def test_crystal_unitarity_deviation_bounded():
    g = 0.1
    c = Crystal(label("a:0"), label("b:0"), g=g)
    out = apply_crystal(vacuum(), c, default_order=2)
    assert abs(out.norm() - 1.0) <= g**4


def test_multimode_first_order_matches_mode_sum():
    mc = MultimodeCrystal("a", "b", modes=(0, 1, 2), g=0.1)
    out = apply_multimode_crystal(vacuum(), mc, default_order=1)
    for m in (0, 1, 2):
        assert out.amplitude(
            {ModeLabel("a", m): 1, ModeLabel("b", m): 1}
        ) == pytest.approx(0.1)


def test_multimode_single_mode_degenerates_to_crystal():
    mc = MultimodeCrystal("a", "b", modes=(0,), g=0.1)
    c = Crystal(label("a:0"), label("b:0"), g=0.1)
    assert apply_multimode_crystal(vacuum(), mc) == apply_crystal(vacuum(), c)


def test_multimode_second_order_matches_squared_sum_oracle():
    # Brute-force expansion of (sum_m a^dag_m b^dag_m)^2 |vac>:
    # distinct modes m < m' give amplitude 2 * (g^2/2) = g^2 on |m,m'>x|m,m'>,
    # equal modes give (g^2/2) * 2 = g^2 on |2m> x |2m>.
    g = 0.1
    mc = MultimodeCrystal("a", "b", modes=(0, 1, 2), g=g)
    out = apply_multimode_crystal(vacuum(), mc, default_order=2)
    four = out.photon_sector(4)
    expected_patterns = 0
    for m in range(3):
        amp = four.amplitude({ModeLabel("a", m): 2, ModeLabel("b", m): 2})
        assert amp == pytest.approx(g * g, abs=1e-15)
        expected_patterns += 1
    for m in range(3):
        for mp in range(m + 1, 3):
            amp = four.amplitude(
                {
                    ModeLabel("a", m): 1,
                    ModeLabel("a", mp): 1,
                    ModeLabel("b", m): 1,
                    ModeLabel("b", mp): 1,
                }
            )
            assert amp == pytest.approx(g * g, abs=1e-14)
            expected_patterns += 1
    assert len(four) == expected_patterns


def test_mode_shift_single_photon():
    out = apply_mode_shift(basis("a:0"), ModeShifter("a", 1))
    assert out == basis("a:1")


def test_mode_shift_zero_is_identity():
    s = basis("a:0 b:2", 0.5j)
    assert apply_mode_shift(s, ModeShifter("a", 0)) == s


def test_mode_shift_moves_every_photon_in_path():
    # Conjugating the doubled raising operator by the shift map sends
    # a^dag_{a,0}^2 to a^dag_{a,1}^2, amplitudes untouched.
    s = basis({"a:0": 2}, 0.7)
    out = apply_mode_shift(s, ModeShifter("a", 1))
    assert out == basis({"a:1": 2}, 0.7)


def test_mode_shift_round_trip_is_identity():
    s = basis("a:0 a:1 b:-1", 1 - 1j)
    out = apply_mode_shift(apply_mode_shift(s, ModeShifter("a", 3)), ModeShifter("a", -3))
    assert out == s


def test_phase_shift_single_photon():
    out = apply_phase_shift(basis("b:0"), PhaseShifter("b", math.pi / 2))
    assert out.amplitude({label("b:0"): 1}) == pytest.approx(1j)


def test_phase_shift_zero_is_identity():
    s = basis("a:0 b:0")
    assert apply_phase_shift(s, PhaseShifter("b", 0.0)) == s


def test_phase_shift_counts_photons():
    out = apply_phase_shift(basis({"b:0": 2}), PhaseShifter("b", math.pi / 2))
    assert out.amplitude({label("b:0"): 2}) == pytest.approx(-1)


def test_phase_and_mode_shift_commute_on_disjoint_paths():
    s = basis("a:0 b:0", 0.8) + basis({"a:1": 2}, 0.2j)
    shift = ModeShifter("a", 2)
    phase = PhaseShifter("b", 0.7)
    one = apply_phase_shift(apply_mode_shift(s, shift), phase)
    other = apply_mode_shift(apply_phase_shift(s, phase), shift)
    assert one == other


def test_misalignment_perfect_transmission_is_identity():
    s = basis("a:0 b:1", 0.6)
    out = apply_misalignment(s, Misalignment("a", 1.0, loss="loss#0"))
    assert out == s


def test_misalignment_single_photon_split():
    t = 0.9
    out = apply_misalignment(basis("a:0"), Misalignment("a", t, loss="loss#0"))
    assert out.amplitude({label("a:0"): 1}) == pytest.approx(t)
    assert out.amplitude({ModeLabel("loss#0", 0): 1}) == pytest.approx(math.sqrt(1 - t * t))


def test_misalignment_two_photon_binomial_oracle():
    # Expanding (T a^dag + R a^dag_loss)^2 |vac> / sqrt(2) by hand gives
    # T^2 |2,0> + sqrt(2) T R |1,1> + R^2 |0,2>.
    t = 0.8
    r = math.sqrt(1 - t * t)
    out = apply_misalignment(basis({"a:0": 2}), Misalignment("a", t, loss="loss#0"))
    assert out.amplitude({label("a:0"): 2}) == pytest.approx(t * t)
    assert out.amplitude(
        {label("a:0"): 1, ModeLabel("loss#0", 0): 1}
    ) == pytest.approx(math.sqrt(2) * t * r)
    assert out.amplitude({ModeLabel("loss#0", 0): 2}) == pytest.approx(r * r)


def test_relabel_moves_single_photon():
    assert apply_relabel(basis("b:0"), Relabel("b", "d")) == basis("d:0")


def test_relabel_of_absent_path_is_identity():
    s = basis("a:0 c:1")
    assert apply_relabel(s, Relabel("b", "d")) == s


def test_relabel_merge_rebuilds_bosonic_factor():
    # Rebuilding from raising operators: a^dag_b a^dag_d |vac> with b -> d
    # becomes a^dag_d^2 |vac> = sqrt(2) |2_d>.
    out = apply_relabel(basis("b:0 d:0"), Relabel("b", "d"))
    assert out.amplitude({label("d:0"): 2}) == pytest.approx(math.sqrt(2))


def test_relabel_merges_only_matching_modes():
    out = apply_relabel(basis("b:1 d:0"), Relabel("b", "d"))
    assert out == basis("d:0 d:1")


def test_resolve_loss_paths_is_positional():
    elements = (
        Misalignment("a", 0.9),
        ModeShifter("a", 1),
        Misalignment("b", 0.8),
        Misalignment("c", 0.7, loss="loss#7"),
    )
    resolved = resolve_loss_paths(elements)
    assert resolved[0].loss == "loss#0"
    assert resolved[2].loss == "loss#1"
    assert resolved[3].loss == "loss#7"


# -- properties ------------------------------------------------------------------

paths = st.sampled_from(["a", "b"])


@st.composite
def small_states(draw):
    result = StateVector.zero()
    for _ in range(draw(st.integers(1, 3))):
        counts = {}
        for _ in range(draw(st.integers(0, 3))):
            lab = ModeLabel(draw(paths), draw(st.integers(0, 2)))
            counts[lab] = counts.get(lab, 0) + 1
        amp = draw(
            st.complex_numbers(min_magnitude=1e-2, max_magnitude=2, allow_nan=False, allow_infinity=False)
        )
        result = result + StateVector.from_occupations(counts, amp)
    return result


@settings(max_examples=100, deadline=None)
@given(small_states(), st.floats(min_value=0.0, max_value=1.0))
def test_misalignment_preserves_norm(s, t):
    out = apply_misalignment(s, Misalignment("a", t, loss="loss#0"))
    assert out.norm() == pytest.approx(s.norm(), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.02, max_value=0.2), st.floats(min_value=0.02, max_value=0.2))
def test_disjoint_crystals_commute(g1, g2):
    c1 = Crystal(label("a:0"), label("b:0"), g=g1)
    c2 = Crystal(label("c:1"), label("d:1"), g=g2)
    one = apply_crystal(apply_crystal(vacuum(), c1), c2)
    other = apply_crystal(apply_crystal(vacuum(), c2), c1)
    # Equality in canonical form: the difference prunes to nothing.
    assert (one - other).is_zero()
