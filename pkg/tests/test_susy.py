"""SUSY engine: operators, mapping tables, partner spectra, equivalence."""

import math

import numpy as np
import pytest

from rm2.analytic import pole_eigenfunction, pole_index_data
from rm2.errors import PreconditionFailed, SeedHasNode, WronskianZero
from rm2.model import ModelParams, potential
from rm2.oracle import Divergent, integrate_norm
from rm2.susy import (
    ReciprocalState,
    SeedKind,
    SeedSpec,
    SusyChain,
    TransformedState,
    apply_b_minus,
    apply_b_plus,
    factorization_residual,
    intertwining_residual,
    partner_potential_first_order,
    partner_potential_wronskian,
    superpotential,
    transform_state_wronskian,
    verify_equivalence,
)

XS = [-6.0, -3.5, -1.0, 0.0, 0.8, 2.0, 4.5, 6.0]


def ratio_spread(values):
    ref = values[0]
    return max(abs(v - ref) for v in values) / abs(ref)


def cross_relation_ratios_extended(lam, beta, xs, dps=50):
    """(-d/dx + W_lam) psi{2}_(lam-1,0) over phi{1}_(lam,0), at 50 digits."""
    mp = pytest.importorskip("mpmath")
    out = []
    with mp.workdps(dps):
        lam, beta = mp.mpf(lam), mp.mpf(beta)
        half = lam - mp.mpf(1) / 2
        s, bp = -half, -beta / half  # exponents of psi{2}_(lam-1, 0)

        def psi2(x):
            z = 1 / (1 + mp.e ** (-2 * x))
            return (
                mp.e ** (bp * x)
                * mp.cosh(x) ** s
                * mp.hyp2f1(1, 2 * lam - 1, lam + mp.mpf(1) / 2 + bp, z)
            )

        def phi1(x):
            return mp.e ** (-beta * x / half) * mp.sech(x) ** half

        def w_super(x):
            return beta / half + half * mp.tanh(x)

        for x in xs:
            x = mp.mpf(x)
            image = -mp.diff(psi2, x) + w_super(x) * psi2(x)
            out.append(float(image / phi1(x)))
    return out


class TestSuperpotential:
    def test_value_at_origin(self):
        p = ModelParams(5.4, 1.0)
        assert superpotential(p, 0.0) == pytest.approx(p.beta / (p.lam - 0.5), rel=1e-14)

    def test_asymptotes(self):
        p = ModelParams(5.4, 1.0)
        half = p.lam - 0.5
        assert superpotential(p, 30.0) == pytest.approx(p.beta / half + half, rel=1e-12)
        assert superpotential(p, -30.0) == pytest.approx(p.beta / half - half, rel=1e-12)

    def test_direct_substitution(self):
        p = ModelParams(5.4, 1.0)
        expected = 1.0 / 4.9 + 4.9 * math.tanh(1.0)
        assert superpotential(p, 1.0) == pytest.approx(expected, rel=1e-14)

    def test_is_negative_log_derivative_of_ground_state(self):
        p = ModelParams(5.4, 1.0)
        phi0 = pole_eigenfunction(p, 1, "phi", 0)
        for x in XS:
            value, deriv = phi0.value_and_derivative(x)
            assert superpotential(p, x) == pytest.approx(-deriv / value, abs=1e-10)


class TestOperatorMaps:
    def test_b_minus_annihilates_ground_state(self):
        p = ModelParams(5.4, 1.0)
        phi0 = pole_eigenfunction(p, 1, "phi", 0)
        for x in XS:
            assert abs(apply_b_minus(p, phi0, x)) < 1e-10 * abs(phi0.value(x))

    def test_b_plus_annihilates_partner_antibound_seedling(self):
        p = ModelParams(5.4, 1.0)
        target = pole_eigenfunction(p.shifted(-1.0), 2, "phi", 0)
        for x in XS:
            assert abs(apply_b_plus(p, target, x)) < 1e-9 * abs(target.value(x))

    def test_b_minus_lowers_condition1_index(self):
        p = ModelParams(5.4, 1.0)
        for n in (1, 2):
            target = pole_eigenfunction(p.shifted(-1.0), 1, "phi", n - 1)
            ratios = [apply_b_minus(p, pole_eigenfunction(p, 1, "phi", n), x) / target.value(x) for x in XS]
            assert ratio_spread(ratios) < 1e-7

    def test_b_minus_raises_condition2_index(self):
        p = ModelParams(5.4, 1.0)
        for n in (0, 1):
            source = pole_eigenfunction(p, 2, "phi", n)
            target = pole_eigenfunction(p.shifted(-1.0), 2, "phi", n + 1)
            ratios = [apply_b_minus(p, source, x) / target.value(x) for x in XS]
            assert ratio_spread(ratios) < 1e-7

    def test_b_plus_raises_condition1_index(self):
        p = ModelParams(5.4, 1.0)
        for n in (1, 2):
            source = pole_eigenfunction(p.shifted(-1.0), 1, "phi", n - 1)
            target = pole_eigenfunction(p, 1, "phi", n)
            ratios = [apply_b_plus(p, source, x) / target.value(x) for x in XS]
            assert ratio_spread(ratios) < 1e-7

    def test_cross_relation_psi1_down(self):
        p = ModelParams(5.4, 1.0)
        psi0 = pole_eigenfunction(p, 1, "psi", 0)
        target = pole_eigenfunction(p.shifted(-1.0), 2, "phi", 0)
        ratios = [apply_b_minus(p, psi0, x) / target.value(x) for x in XS]
        assert ratio_spread(ratios) < 1e-7

    def test_cross_relation_psi2_up(self):
        # This image decays while its source grows at rate mu, so the direct
        # operator loses exp(2 mu x) digits to cancellation; doubles carry the
        # relation up to x ~ 2 and extended precision covers the full range.
        p = ModelParams(5.4, 1.0)
        psi2 = pole_eigenfunction(p.shifted(-1.0), 2, "psi", 0)
        target = pole_eigenfunction(p, 1, "phi", 0)
        ratios = [apply_b_plus(p, psi2, x) / target.value(x) for x in XS if x <= 2.0]
        assert ratio_spread(ratios) < 1e-7
        full_range = cross_relation_ratios_extended(p.lam, p.beta, XS)
        assert ratio_spread(full_range) < 1e-10

    def test_psi_map_lowers_index_too(self):
        p = ModelParams(5.4, 1.0)
        source = pole_eigenfunction(p, 1, "psi", 2)
        target = pole_eigenfunction(p.shifted(-1.0), 1, "psi", 1)
        ratios = [apply_b_minus(p, source, x) / target.value(x) for x in XS]
        assert ratio_spread(ratios) < 1e-7


class TestFactorizationAndIntertwining:
    def test_factorization_on_smooth_functions(self):
        p = ModelParams(5.4, 1.0)
        rng = np.random.default_rng(41)
        for _ in range(5):
            a = float(rng.uniform(0.2, 1.5))
            c = float(rng.uniform(-2, 2))
            b = float(rng.uniform(-1, 1))

            def triple(x, a=a, c=c, b=b):
                g = math.exp(-a * (x - c) ** 2)
                f = (1 + b * x) * g
                fp = (b - 2 * a * (x - c) * (1 + b * x)) * g
                fpp = (
                    -2 * a * (1 + b * x)
                    - 2 * a * (x - c) * b
                    + (-2 * a * (x - c)) * (b - 2 * a * (x - c) * (1 + b * x))
                ) * g
                return f, fp, fpp

            for x in XS:
                f, _, _ = triple(x)
                assert factorization_residual(p, triple, x) < 1e-7 * max(1.0, abs(f))

    def test_intertwining_on_eigenfunctions(self):
        p = ModelParams(5.4, 1.0)
        for n in (0, 1, 2):
            w = pole_eigenfunction(p, 1, "phi", n)
            for x in XS:
                assert intertwining_residual(p, w, x) < 1e-6 * max(1.0, abs(w.value(x)))


class TestPartnerPotentials:
    def test_shape_invariance_first_order(self):
        p = ModelParams(5.4, 1.0)
        partner = partner_potential_first_order(p, SeedSpec(SeedKind.GROUND_STATE, 1, 0))
        shifted = p.shifted(-1.0)
        for x in np.linspace(-10, 10, 201):
            assert abs(partner(float(x)) - potential(shifted, float(x))) < 1e-9

    def test_chain_of_one_equals_first_order(self):
        p = ModelParams(5.3, 4.0)
        seed = SeedSpec(SeedKind.REDUNDANT, 1, 4)
        first = partner_potential_first_order(p, seed)
        chain = partner_potential_wronskian(SusyChain(p, (seed,)))
        for x in np.linspace(-9, 9, 61):
            assert abs(first(float(x)) - chain(float(x))) < 1e-12 * max(1.0, abs(first(float(x))))

    def test_ground_chain_is_double_shift(self):
        p = ModelParams(5.4, 1.0)
        chain = SusyChain(
            p, (SeedSpec(SeedKind.GROUND_STATE, 1, 0), SeedSpec(SeedKind.BOUND_EXCITED, 1, 1))
        )
        partner = partner_potential_wronskian(chain)
        shifted = p.shifted(-2.0)
        for x in np.linspace(-10, 10, 201):
            assert abs(partner(float(x)) - potential(shifted, float(x))) < 1e-8

    def test_two_level_deletion_spectrum(self):
        p = ModelParams(5.4, 1.0)
        chain = SusyChain(
            p, (SeedSpec(SeedKind.BOUND_EXCITED, 1, 1), SeedSpec(SeedKind.BOUND_EXCITED, 1, 2))
        )
        partner = partner_potential_wronskian(chain)
        spectrum = partner.oracle_spectrum()
        assert len(spectrum.energies) == 2
        expected = [pole_index_data(p, 1, 0).energy, pole_index_data(p, 1, 3).energy]
        for found, target in zip(spectrum.energies, expected):
            assert found == pytest.approx(target, abs=1e-5)

    def test_ground_seed_removes_lowest_level(self):
        p = ModelParams(5.4, 1.0)
        partner = partner_potential_first_order(p, SeedSpec(SeedKind.GROUND_STATE, 1, 0))
        spectrum = partner.oracle_spectrum()
        expected = [pole_index_data(p, 1, n).energy for n in (1, 2, 3)]
        assert len(spectrum.energies) == 3
        for found, target in zip(spectrum.energies, expected):
            assert found == pytest.approx(target, abs=1e-5)

    def test_redundant_seed_is_isospectral(self):
        p = ModelParams(5.3, 4.0)
        partner = partner_potential_first_order(p, SeedSpec(SeedKind.REDUNDANT, 1, 4))
        spectrum = partner.oracle_spectrum()
        expected = [pole_index_data(p, 1, n).energy for n in range(3)]
        assert len(spectrum.energies) == 3
        for found, target in zip(spectrum.energies, expected):
            assert found == pytest.approx(target, abs=1e-5)

    def test_anti_bound_seed_adds_one_state(self):
        p = ModelParams(2.4, 1.0)
        seed = SeedSpec(SeedKind.ANTI_BOUND, 2, 2)
        partner = partner_potential_first_order(p, seed)
        spectrum = partner.oracle_spectrum()
        assert len(spectrum.energies) == 2
        seed_energy = pole_index_data(p, 2, 2).energy
        assert spectrum.energies[0] == pytest.approx(seed_energy, abs=1e-4)
        assert spectrum.energies[1] == pytest.approx(pole_index_data(p, 1, 0).energy, abs=1e-5)
        # the new ground state is the reciprocal of the seed
        w = pole_eigenfunction(p, 2, "phi", 2)
        assert not isinstance(integrate_norm(ReciprocalState(w)), Divergent)

    def test_partner_keeps_asymptotics(self):
        p = ModelParams(2.4, 1.0)
        partner = partner_potential_first_order(p, SeedSpec(SeedKind.ANTI_BOUND, 2, 2))
        assert partner(24.0) == pytest.approx(2 * p.beta, abs=1e-8)
        assert partner(-24.0) == pytest.approx(-2 * p.beta, abs=1e-8)

    def test_noded_seed_refused(self):
        p = ModelParams(5.4, 1.0)
        with pytest.raises(SeedHasNode):
            partner_potential_first_order(p, SeedSpec(SeedKind.BOUND_EXCITED, 1, 1))

    def test_wrong_kind_refused(self):
        p = ModelParams(5.4, 1.0)
        with pytest.raises(PreconditionFailed):
            partner_potential_first_order(p, SeedSpec(SeedKind.REDUNDANT, 1, 1))

    def test_invalid_chain_wronskian_zero(self):
        # deleting a non-contiguous block (n = 1, 3) leaves a vanishing Wronskian
        p = ModelParams(5.4, 1.0)
        chain = SusyChain(
            p, (SeedSpec(SeedKind.BOUND_EXCITED, 1, 1), SeedSpec(SeedKind.BOUND_EXCITED, 1, 3))
        )
        with pytest.raises(WronskianZero):
            partner_potential_wronskian(chain)


class TestTransformedStates:
    def test_single_seed_transform_matches_operator(self):
        p = ModelParams(5.4, 1.0)
        chain = SusyChain(p, (SeedSpec(SeedKind.GROUND_STATE, 1, 0),))
        for n in (1, 2):
            w = pole_eigenfunction(p, 1, "phi", n)
            target = pole_eigenfunction(p.shifted(-1.0), 1, "phi", n - 1)
            ratios = [transform_state_wronskian(chain, w, x) / target.value(x) for x in XS]
            assert ratio_spread(ratios) < 1e-7

    def test_chain_member_maps_to_zero(self):
        p = ModelParams(5.4, 1.0)
        chain = SusyChain(p, (SeedSpec(SeedKind.GROUND_STATE, 1, 0),))
        w = pole_eigenfunction(p, 1, "phi", 0)
        for x in (-2.0, 0.3, 1.8):
            scale = abs(w.value(x))
            assert abs(transform_state_wronskian(chain, w, x)) < 1e-12 * scale

    def test_deletion_chain_ground_state(self):
        # deleting n = 1, 2 leaves phi0's image as the partner ground state
        p = ModelParams(5.4, 1.0)
        chain = SusyChain(
            p, (SeedSpec(SeedKind.BOUND_EXCITED, 1, 1), SeedSpec(SeedKind.BOUND_EXCITED, 1, 2))
        )
        state = TransformedState(chain, pole_eigenfunction(p, 1, "phi", 0))
        norm = integrate_norm(state)
        assert isinstance(norm, float)
        partner = partner_potential_wronskian(chain)
        spectrum = partner.oracle_spectrum()
        assert spectrum.energies[0] == pytest.approx(state.energy, abs=1e-5)


class TestEquivalence:
    def test_order_three_equivalence(self):
        report = verify_equivalence(2.4, 1.0, 3)
        assert report.max_potential_diff < 1e-7
        assert report.max_energy_diff < 1e-4
        assert report.passed
        expected = (
            pole_index_data(ModelParams(5.4, 1.0), 1, 0).energy,
            pole_index_data(ModelParams(2.4, 1.0), 1, 0).energy,
        )
        assert report.expected_energies == pytest.approx(expected)

    def test_even_order_rejected_with_node_diagnostic(self):
        with pytest.raises(PreconditionFailed) as excinfo:
            verify_equivalence(2.4, 1.0, 2)
        assert "nodeless" in str(excinfo.value)

    def test_alpha_range_enforced(self):
        with pytest.raises(PreconditionFailed):
            verify_equivalence(3.4, 1.0, 3)

    @pytest.mark.slow
    def test_order_five_equivalence(self):
        report = verify_equivalence(2.2, 1.0, 5)
        assert report.max_potential_diff < 1e-6
        assert report.passed
