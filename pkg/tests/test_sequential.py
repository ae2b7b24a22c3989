import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from helpers import all_indices, naive_effect, naive_probability, random_instrument, random_luders2, random_sharp
from conftest import pauli_combo
from seqtomo.instrument import (
    DensityOperator,
    make_example1,
    make_example2,
    make_luders,
    make_nqubit_shift,
    make_qudit_mub,
    sic_qubit_effects,
)
from seqtomo.linalg import span_rank
from seqtomo.sequential import (
    LeafCapExceeded,
    collective_effects,
    format_multi_index,
    gram_report,
    ic_search,
    min_depth_bound,
    multi_indices,
    outcome_distribution,
    parse_multi_index,
)


def example1_closed_form(p):
    s = p * math.sqrt(1 - p)
    return {
        (1, 1): pauli_combo(1, -s, 0, -p) / 4,
        (1, 2): pauli_combo(1, s, 0, -p) / 4,
        (2, 1): pauli_combo(1, 0, -s, p) / 4,
        (2, 2): pauli_combo(1, 0, s, p) / 4,
    }


def example2_closed_form(p):
    s = p * math.sqrt(1 - p * p)
    return {
        (1, 1): pauli_combo(1, -s, 0, -p) / 4,
        (1, 2): pauli_combo(1, s, 0, -p) / 4,
        (2, 1): pauli_combo(1, 0, -s, p) / 4,
        (2, 2): pauli_combo(1, 0, s, p) / 4,
    }


class TestMultiIndex:
    def test_order(self):
        assert multi_indices(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_format(self):
        assert format_multi_index((1, 2, 1)) == "121"
        assert format_multi_index((1, 10)) == "1,10"

    def test_parse(self):
        assert parse_multi_index("121", 2) == (1, 2, 1)
        assert parse_multi_index("1,10", 11) == (1, 10)
        with pytest.raises(ValueError):
            parse_multi_index("13", 2)


class TestCollectiveEffects:
    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_example1_closed_form(self, p):
        es = collective_effects(make_example1(p), 2)
        for ix, E in example1_closed_form(p).items():
            assert np.max(np.abs(es[ix] - E)) <= 1e-12

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_example2_closed_form(self, p):
        es = collective_effects(make_example2(p), 2)
        for ix, E in example2_closed_form(p).items():
            assert np.max(np.abs(es[ix] - E)) <= 1e-12

    def test_depth1_is_povm(self):
        ins = make_qudit_mub(3, 0.4)
        assert_allclose(collective_effects(ins, 1).effects, ins.effects(), atol=1e-15)

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_example2_boundary_not_ic(self, p):
        es = collective_effects(make_example2(p), 2)
        assert es.span_rank < 4 and not es.is_ic

    def test_lookup_by_string(self):
        es = collective_effects(make_example1(0.5), 2)
        assert_allclose(es["21"], es[(2, 1)])
        with pytest.raises(KeyError):
            es[(1, 2, 1)]

    def test_leaf_cap(self):
        with pytest.raises(LeafCapExceeded):
            collective_effects(make_example1(0.5), 13)
        assert len(collective_effects(make_example1(0.5), 13, max_leaves=2**13)) == 2**13

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive_nesting(self, seed):
        rng = np.random.default_rng(seed)
        ins = random_instrument(3, 2, 2, rng)
        es = collective_effects(ins, 3)
        for ix in all_indices(2, 3):
            assert_allclose(es[ix], naive_effect(ins, ix), atol=1e-13)

    @pytest.mark.parametrize(
        "ins",
        [make_example1(0.4), make_example2(0.7), make_qudit_mub(3, 0.5), make_nqubit_shift(2, make_example1(0.5))],
        ids=lambda i: i.label,
    )
    def test_completeness_and_bounds(self, ins):
        for depth in range(1, 5):
            es = collective_effects(ins, depth)
            assert np.max(np.abs(es.effects.sum(axis=0) - np.eye(ins.dim))) <= 1e-9
            for E in es.effects:
                w = np.linalg.eigvalsh(E)
                assert w[0] >= -1e-9 and w[-1] <= 1 + 1e-9

    def test_recursion_consistency(self):
        ins = make_example1(0.35)
        shallow = collective_effects(ins, 2)
        deep = collective_effects(ins, 3)
        for j1 in (1, 2):
            for rest in all_indices(2, 2):
                assert_allclose(deep[(j1,) + rest], ins[j1 - 1].dual(shallow[rest]), atol=1e-14)

    @pytest.mark.parametrize(
        "ins",
        [make_example1(0.4), make_example2(0.5), make_qudit_mub(3, 0.3), make_luders(sic_qubit_effects())],
        ids=lambda i: i.label,
    )
    def test_monotone_rank(self, ins):
        ranks = ic_search(ins, 4 if ins.outcomes == 2 else 3).rank_per_depth
        assert ranks == sorted(ranks)

    def test_is_ic_flag(self):
        es = collective_effects(make_qudit_mub(3, 0.5), 2)
        assert es.is_ic == (es.span_rank == 9)


class TestNegativeResults:
    @pytest.mark.parametrize("seed", range(5))
    def test_sharp_support(self, seed):
        rng = np.random.default_rng(100 + seed)
        ins = random_sharp(3, rng)
        projectors = ins.effects()
        es = collective_effects(ins, 3)
        for ix, E in zip(es.indices, es.effects):
            P = projectors[ix[0] - 1]
            assert np.max(np.abs(E - P @ E @ P)) <= 1e-10
        # each branch lives in L(supp P_j), so the span is at most sum rank(P_j)^2 < d^2
        bound = sum(round(np.trace(P).real) ** 2 for P in projectors)
        assert es.span_rank <= bound < 9

    @pytest.mark.parametrize("seed", range(5))
    def test_luders2_commutes(self, seed):
        rng = np.random.default_rng(200 + seed)
        ins = random_luders2(3, rng)
        E1 = ins.effects()[0]
        es = collective_effects(ins, 4)
        for E in es.effects:
            assert np.max(np.abs(E @ E1 - E1 @ E)) <= 1e-10
        assert es.span_rank <= 3

    def test_luders2_power_form(self):
        E1 = np.diag([0.3, 0.7])
        E2 = np.eye(2) - E1
        es = collective_effects(make_luders([E1, E2]), 4)
        for ix, E in zip(es.indices, es.effects):
            n1 = ix.count(1)
            assert_allclose(E, np.linalg.matrix_power(E1, n1) @ np.linalg.matrix_power(E2, 4 - n1), atol=1e-15)

    def test_sigma_z_projective_never_ic(self):
        from seqtomo.instrument import make_projective

        res = ic_search(make_projective([np.diag([1.0, 0]), np.diag([0, 1.0])]), 6)
        assert res.first_ic_depth is None and max(res.rank_per_depth) <= 2

    @pytest.mark.parametrize("seed", range(20))
    def test_sigma_z_projective_random_unitary_channels(self, seed):
        from seqtomo.instrument import QuantumOperation, make_projective
        from seqtomo.linalg import random_unitary

        rng = np.random.default_rng(seed)
        chans = [QuantumOperation([random_unitary(2, rng)]) for _ in range(2)]
        res = ic_search(make_projective([np.diag([1.0, 0]), np.diag([0, 1.0])], chans), 6)
        assert max(res.rank_per_depth) < 4


class TestOutcomeDistribution:
    def test_example1_mixed_uniform(self):
        probs = outcome_distribution(make_example1(0.37), 2, DensityOperator.maximally_mixed(2))
        assert_allclose(probs, [0.25] * 4, atol=1e-15)

    def test_example2_ground_state(self):
        p = 1 / math.sqrt(2)
        probs = outcome_distribution(make_example2(p), 2, DensityOperator.basis(2, 0))
        lo, hi = (1 - p) / 4, (1 + p) / 4
        assert_allclose(probs, [lo, lo, hi, hi], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            outcome_distribution(make_example1(0.5), 2, DensityOperator.maximally_mixed(3))

    def test_matches_naive_forward(self, rng):
        ins = random_instrument(2, 3, 1, rng)
        rho = DensityOperator.random(2, rng)
        probs = outcome_distribution(ins, 3, rho)
        for ix, pr in zip(all_indices(3, 3), probs):
            assert abs(pr - naive_probability(ins, ix, rho.matrix)) <= 1e-14

    def test_duality_random(self):
        rng = np.random.default_rng(7)
        for trial in range(50):
            d = int(rng.integers(2, 5))
            m = int(rng.integers(2, 4))
            ins = random_instrument(d, m, int(rng.integers(1, 3)), rng)
            rho = DensityOperator.random(d, rng)
            depth = int(rng.integers(1, 4))
            forward = outcome_distribution(ins, depth, rho)
            via_effects = collective_effects(ins, depth).probabilities(rho)
            assert np.max(np.abs(forward - via_effects)) <= 1e-10
            assert abs(forward.sum() - 1) <= 1e-9


class TestGram:
    def test_example1_optimum(self):
        assert abs(gram_report(collective_effects(make_example1(2 / 3), 2)).condition_number - 13.5) <= 1e-6

    def test_example2_optimum(self):
        rep = gram_report(collective_effects(make_example2(1 / math.sqrt(2)), 2))
        assert abs(rep.condition_number - 8) <= 1e-6

    def test_sic(self):
        rep = gram_report(collective_effects(make_luders(sic_qubit_effects()), 1))
        assert abs(rep.condition_number - 3) <= 1e-9
        assert_allclose(rep.eigenvalues, [0.5, 1 / 6, 1 / 6, 1 / 6], atol=1e-15)

    def test_example1_gram_closed_form(self):
        # from the closed forms, tr(E_x E_y) = (1 + c_x . c_y) / 8 with Bloch-like vectors c_x
        p = 0.4
        cf = example1_closed_form(p)
        es = collective_effects(make_example1(p), 2)
        rep = gram_report(es)
        for a, x in enumerate(es.indices):
            for b, y in enumerate(es.indices):
                assert abs(rep.gram[a, b] - np.trace(cf[x] @ cf[y]).real) <= 1e-14

    def test_not_ic_is_infinite(self):
        rep = gram_report(collective_effects(make_example1(0.5), 1))
        assert math.isinf(rep.condition_number) and not rep.is_finite
        assert "span" in rep.infinite_reason

    def test_overcomplete_is_infinite(self):
        rep = gram_report(collective_effects(make_example1(0.5), 3))
        assert math.isinf(rep.condition_number)

    def test_symmetric(self):
        rep = gram_report(collective_effects(make_qudit_mub(3, 0.5), 2))
        assert_allclose(rep.gram, rep.gram.T)
        assert np.all(np.diff(rep.eigenvalues) <= 0)


class TestMinDepth:
    def test_qubit(self):
        assert min_depth_bound(2, 2) == 2

    @pytest.mark.parametrize("n", range(1, 9))
    def test_nqubit(self, n):
        assert min_depth_bound(2, 2**n) == 2 * n

    @pytest.mark.parametrize("d", [2, 3, 7, 10, 31])
    def test_m_equals_d(self, d):
        assert min_depth_bound(d, d) == 2

    @pytest.mark.parametrize("m,d", [(3, 5), (2, 3), (5, 2), (10, 1000), (7, 343)])
    def test_brute_force(self, m, d):
        N = next(n for n in range(1, 100) if m**n >= d * d)
        assert min_depth_bound(m, d) == N

    def test_errors(self):
        with pytest.raises(ValueError):
            min_depth_bound(1, 2)


class TestICSearch:
    def test_example2(self):
        res = ic_search(make_example2(0.5), 3)
        assert res.first_ic_depth == 2 and len(res.rank_per_depth) == 3

    def test_luders_never(self):
        E1 = np.diag([0.3, 0.7])
        res = ic_search(make_luders([E1, np.eye(2) - E1]), 6)
        assert res.first_ic_depth is None and max(res.rank_per_depth) <= 2

    def test_two_qubit_shift(self):
        res = ic_search(make_nqubit_shift(2, make_example2(0.5)), 4)
        assert res.first_ic_depth == 4

    def test_matches_collective_effects(self):
        ins = make_example1(0.3)
        ranks = ic_search(ins, 4).rank_per_depth
        assert ranks == [span_rank(collective_effects(ins, N).effects) for N in range(1, 5)]


class TestShiftFactorization:
    @pytest.mark.parametrize("n", [2, 3])
    def test_effects_factor(self, n):
        base = make_example2(0.5)
        base_es = collective_effects(base, 2)
        es = collective_effects(make_nqubit_shift(n, base), 2 * n)
        for ix, E in zip(es.indices, es.effects):
            # qubit 1 is measured at steps 1 and n+1; the shift brings qubit q >= 2
            # under the apparatus at steps n-q+2 and 2n-q+2
            factors = [base_es[(ix[0], ix[n])]] + [base_es[(ix[n - q + 1], ix[2 * n - q + 1])] for q in range(2, n + 1)]
            expected = factors[0]
            for f in factors[1:]:
                expected = np.kron(expected, f)
            assert_allclose(E, expected, atol=1e-14)
        assert es.span_rank == 4**n
