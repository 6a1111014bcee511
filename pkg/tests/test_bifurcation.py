"""First-order bifurcation curves in the reduced parameter plane."""

from __future__ import annotations

import math

import numpy as np
import pytest

from doublezero.bifurcation import (
    CYCLE_FOLD_SLOPE,
    BifurcationCurve,
    CurveKind,
    CurveLabel,
    Stability,
    classify_stability,
    family_half_plane,
    heteroclinic_curves,
    homoclinic_curves,
    saddle_node_curves,
    unperturbed_diagram,
)
from doublezero.errors import DegenerateL, DomainError
from doublezero.fourier import TrigPolynomial, cosine
from doublezero.melnikov import (
    MelnikovProfile,
    h_hat,
    h_hat_subharmonic,
    j_integrals,
    separatrix_constants,
)
from doublezero.orbits import FamilyKind, FamilyTag, modulus_range, resonant_modulus


def _zero_profile(tag: FamilyTag) -> MelnikovProfile:
    return MelnikovProfile.from_trig(TrigPolynomial(), family=FamilyKind(tag))


def test_zero_forcing_collapses_connection_lines() -> None:
    # With no forcing projection every connection line must coincide with
    # the unforced saddle-connection slope on its half-plane, exactly.
    for s2 in (-1, 1):
        for curve in heteroclinic_curves(s2, 1.0, _zero_profile(FamilyTag.HET_PAIR)):
            assert abs(curve.slope - s2 / 5.0) <= 1e-14
            assert curve.nu1_sign == -1
            assert curve.label.note is not None
        for curve in homoclinic_curves(s2, 1.0, _zero_profile(FamilyTag.HOM_PAIR)):
            assert abs(curve.slope - (-4.0 * s2 / 5.0)) <= 1e-14
            assert curve.nu1_sign == 1
            assert curve.label.note is not None


def test_connection_windows_have_first_order_width() -> None:
    omega_hat = 1.4
    prof = h_hat(cosine(1.0), FamilyTag.HET_PAIR, omega_hat)
    c1, _ = separatrix_constants(FamilyTag.HET_PAIR)
    for delta in (0.5, 2.0):
        curves = heteroclinic_curves(1, delta, prof)
        assert len(curves) == 4
        slopes = sorted(c.slope for c in curves)
        expected_width = delta * (prof.hmax - prof.hmin) / c1
        assert slopes[-1] - slopes[0] == pytest.approx(expected_width, rel=1e-12)
        # The pair straddles the unforced line symmetrically for cosine forcing.
        mid = 0.5 * (slopes[0] + slopes[-1])
        assert mid == pytest.approx(0.2, abs=1e-12)


def test_loop_connection_window() -> None:
    omega_hat = 0.9
    prof = h_hat(cosine(1.0), FamilyTag.HOM_PAIR, omega_hat)
    c1, _ = separatrix_constants(FamilyTag.HOM_PAIR)
    curves = homoclinic_curves(-1, 1.0, prof)
    assert len(curves) == 4
    assert {c.label.family for c in curves} == {"hom-right", "hom-left"}
    slopes = sorted(c.slope for c in curves)
    assert slopes[-1] - slopes[0] == pytest.approx(
        (prof.hmax - prof.hmin) / c1, rel=1e-12
    )
    mid = 0.5 * (slopes[0] + slopes[-1])
    assert mid == pytest.approx(0.8, abs=1e-12)


def test_saddle_node_window_formula() -> None:
    omega_hat = 0.8
    tag = FamilyTag.INSIDE_HET
    k = resonant_modulus(tag, 1, 1, omega_hat)
    j = j_integrals(tag, k, 1)
    prof = h_hat_subharmonic(cosine(1.0), tag, k, 1, 1, omega_hat)
    for s2 in (-1, 1):
        for delta in (0.5, 1.0):
            curves = saddle_node_curves(s2, delta, 1, prof, j)
            assert len(curves) == 2
            by_ext = {c.label.extremum: c for c in curves}
            assert by_ext["max"].slope == pytest.approx(
                (delta * prof.hmax + s2 * j.j2) / j.j1, rel=1e-12
            )
            assert by_ext["min"].slope == pytest.approx(
                (delta * prof.hmin + s2 * j.j2) / j.j1, rel=1e-12
            )
            for c in curves:
                assert c.nu1_sign == -1
                assert (c.label.m, c.label.n) == (1, 1)


def test_one_sided_loop_family_emits_both_copies() -> None:
    omega_hat = 2.0 * math.pi / 9.0
    tag = FamilyTag.INSIDE_HOM
    k = resonant_modulus(tag, 1, 1, omega_hat)
    j = j_integrals(tag, k, 1)
    prof = h_hat_subharmonic(cosine(1.0), FamilyKind(tag, 1), k, 1, 1, omega_hat)
    curves = saddle_node_curves(1, 1.0, 1, prof, j)
    assert len(curves) == 4
    families = {c.label.family for c in curves}
    assert families == {"inside-hom-right", "inside-hom-left"}
    # The mirrored copy sees the negated projection: its max/min windows are
    # the reflections of the original's.
    rights = sorted(c.slope for c in curves if c.label.family.endswith("right"))
    lefts = sorted(c.slope for c in curves if c.label.family.endswith("left"))
    assert rights[1] - rights[0] == pytest.approx(lefts[1] - lefts[0], rel=1e-12)


def test_half_plane_assignment() -> None:
    assert family_half_plane(FamilyTag.INSIDE_HET) == -1
    assert family_half_plane(FamilyTag.GLOBAL) == -1
    assert family_half_plane(FamilyTag.INSIDE_HOM) == 1
    assert family_half_plane(FamilyTag.OUTSIDE_HOM) == 1


def test_stability_classification() -> None:
    omega_hat = 0.8
    tag = FamilyTag.INSIDE_HET
    k = resonant_modulus(tag, 1, 1, omega_hat)
    j = j_integrals(tag, k, 1)
    t_hat = 2.0 * math.pi / omega_hat
    sink = classify_stability(1, j, 1, t_hat, nu_hat=-2.0)
    assert sink.sink_or_source is Stability.SINK
    source = classify_stability(1, j, 1, t_hat, nu_hat=2.0)
    assert source.sink_or_source is Stability.SOURCE
    # The verdict flips exactly on the boundary slope line.
    boundary_nu = -1 * 1 * j.j3 / (1 * t_hat)
    verdict = classify_stability(1, j, 1, t_hat, nu_hat=boundary_nu - 0.01)
    assert verdict.sink_or_source is Stability.SINK
    verdict = classify_stability(1, j, 1, t_hat, nu_hat=boundary_nu + 0.01)
    assert verdict.sink_or_source is Stability.SOURCE
    assert verdict.boundary_slope == pytest.approx(1 * j.j3 / t_hat, rel=1e-12)
    with pytest.raises(DegenerateL):
        classify_stability(1, j, 1, t_hat, nu_hat=boundary_nu)


def test_unperturbed_diagram_skeletons() -> None:
    for s2 in (-1, 1):
        three = unperturbed_diagram(1, s2)
        assert len(three) == 3
        kinds = [c.kind for c in three]
        assert kinds.count(CurveKind.PITCHFORK) == 1
        assert kinds.count(CurveKind.HOPF) == 1
        assert kinds.count(CurveKind.UNPERTURBED_SADDLE_CONNECTION) == 1
        connection = next(
            c for c in three if c.kind is CurveKind.UNPERTURBED_SADDLE_CONNECTION
        )
        assert connection.slope == pytest.approx(s2 / 5.0)
        assert connection.nu1_sign == -1

        five = unperturbed_diagram(-1, s2)
        assert len(five) == 5
        kinds = [c.kind for c in five]
        assert kinds.count(CurveKind.HOPF) == 2
        assert kinds.count(CurveKind.UNPERTURBED_CYCLE_FOLD) == 1
        loop = next(
            c for c in five if c.kind is CurveKind.UNPERTURBED_SADDLE_CONNECTION
        )
        assert loop.slope == pytest.approx(-4.0 * s2 / 5.0)
        assert loop.nu1_sign == 1
        fold = next(c for c in five if c.kind is CurveKind.UNPERTURBED_CYCLE_FOLD)
        assert fold.slope == pytest.approx(-CYCLE_FOLD_SLOPE * s2)


def test_cycle_fold_constant_matches_orbit_integral_minimum() -> None:
    # The fold of unforced cycles happens where nu_hat = -s2 * J2/J1 peaks:
    # the recorded display constant approximates min over k of J2/J1.
    tag = FamilyTag.OUTSIDE_HOM
    lo, hi = modulus_range(tag)
    ratios = []
    for k in np.linspace(lo + 1e-4, hi - 1e-6, 2001):
        j = j_integrals(tag, float(k), 1)
        ratios.append(j.j2 / j.j1)
    assert min(ratios) == pytest.approx(CYCLE_FOLD_SLOPE, abs=1.5e-3)


def test_curve_records_round_trip() -> None:
    curve = BifurcationCurve(
        kind=CurveKind.SADDLE_NODE,
        slope=1.25,
        nu1_sign=-1,
        label=CurveLabel(m=3, n=2, family="inside-het", extremum="max"),
    )
    rec = curve.as_record()
    assert rec["kind"] == "saddle-node"
    assert rec["slope"] == 1.25
    assert rec["nu1_sign"] == -1
    assert (rec["m"], rec["n"]) == (3, 2)
    assert rec["family"] == "inside-het"
    assert rec["extremum"] == "max"


def test_profile_and_family_mismatches_are_rejected() -> None:
    omega_hat = 0.8
    k = resonant_modulus(FamilyTag.INSIDE_HET, 1, 1, omega_hat)
    j = j_integrals(FamilyTag.INSIDE_HET, k, 1)
    prof = h_hat_subharmonic(cosine(1.0), FamilyTag.INSIDE_HET, k, 1, 1, omega_hat)
    with pytest.raises(DomainError):
        saddle_node_curves(2, 1.0, 1, prof, j)
    with pytest.raises(DomainError):
        saddle_node_curves(1, 1.0, 2, prof, j)
    hom_prof = h_hat(cosine(1.0), FamilyTag.HOM_PAIR, omega_hat)
    with pytest.raises(DomainError):
        heteroclinic_curves(1, 1.0, hom_prof)
    with pytest.raises(DomainError):
        unperturbed_diagram(0, 1)
