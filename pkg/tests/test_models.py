import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalind.errors import SpecError
from causalind.inference import Enumerator, eliminate, enumerate_posterior, joint_size
from causalind.models import (
    NoisyAdderSpec,
    NoisyOrSpec,
    apply_permutation,
    blood_disorder_fixture,
    build,
    build_atemporal_noisy_adder,
    build_atemporal_noisy_or,
    build_explicit_temporal_adder,
    build_naive_noisy_or,
    build_temporal_noisy_adder,
    build_temporal_noisy_or,
    random_adder_spec,
    random_noisy_or_spec,
    reorder_causes,
)
from causalind.netcore import d_separated, validate
from oracles import conditional_gap, convolve_effect, noisy_or_closed_form

POINT0_L1 = (0.0, 1.0, 0.0)


def effect_marginal(net, evidence=None):
    return enumerate_posterior(net, net.annotations["effect"], evidence).probs


def causes_ev(values):
    return {f"c{j}": "true" if v else "false" for j, v in values.items()}


class TestSpecs:
    def test_noisy_or_lengths(self):
        with pytest.raises(SpecError):
            NoisyOrSpec(q=(0.1, 0.2), leak=0.0, cause_priors=(0.5,))

    def test_noisy_or_range(self):
        with pytest.raises(SpecError):
            NoisyOrSpec(q=(1.2,), leak=0.0, cause_priors=(0.5,))

    def test_adder_row_sum(self):
        with pytest.raises(SpecError, match="sums to"):
            NoisyAdderSpec(l=1, q=((0.2, 0.2, 0.2),), leak=POINT0_L1, cause_priors=(0.5,))

    def test_adder_width(self):
        with pytest.raises(SpecError, match="expected 3"):
            NoisyAdderSpec(l=1, q=((0.5, 0.5),), leak=POINT0_L1, cause_priors=(0.5,))

    def test_nonneg_forbids_negative_mass(self):
        with pytest.raises(SpecError, match="negative"):
            NoisyAdderSpec(l=1, q=((0.1, 0.4, 0.5),), leak=POINT0_L1, cause_priors=(0.5,), nonneg=True)

    def test_unknown_encoding(self):
        with pytest.raises(SpecError):
            build(NoisyOrSpec(q=(0.5,), leak=0.0, cause_priors=(0.5,)), "explicit")


class TestAtemporalNoisyOr:
    def test_certain_cause(self):
        net = build_atemporal_noisy_or(NoisyOrSpec(q=(1.0,), leak=0.0, cause_priors=(0.3,)))
        assert effect_marginal(net, {"c1": "true"})[1] == 1.0

    def test_only_leak(self):
        net = build_atemporal_noisy_or(NoisyOrSpec(q=(0.3, 0.5), leak=0.1, cause_priors=(0.5, 0.5)))
        assert effect_marginal(net, {"c1": "false", "c2": "false"})[1] == pytest.approx(0.1, abs=1e-15)

    def test_both_causes_on(self):
        # enumeration oracle; equals 1-(1-0.1)(1-0.3)(1-0.5)
        net = build_atemporal_noisy_or(NoisyOrSpec(q=(0.3, 0.5), leak=0.1, cause_priors=(0.5, 0.5)))
        assert effect_marginal(net, {"c1": "true", "c2": "true"})[1] == pytest.approx(0.685, abs=1e-12)

    def test_structure(self):
        net = build_atemporal_noisy_or(NoisyOrSpec(q=(0.3, 0.5), leak=0.1, cause_priors=(0.5, 0.5)))
        assert net.names == ("c0", "c1", "c2", "i0", "i1", "i2", "e")
        assert list(net.table("c0").table) == [0.0, 1.0]
        assert list(net.table("i1").table) == [1.0, 0.0, 0.7, 0.3]
        assert net.parents("e") == ("i0", "i1", "i2")
        assert validate(net).ok


class TestTemporalNoisyOr:
    @pytest.mark.parametrize("seed", range(5))
    def test_all_off_gives_leak(self, seed):
        spec = random_noisy_or_spec(np.random.default_rng(seed), 4)
        net = build_temporal_noisy_or(spec)
        ev = causes_ev({j: False for j in range(1, 5)})
        assert effect_marginal(net, ev)[1] == pytest.approx(spec.leak, abs=1e-15)

    def test_single_step(self):
        net = build_temporal_noisy_or(NoisyOrSpec(q=(0.8,), leak=0.0, cause_priors=(0.5,)))
        assert effect_marginal(net, {"c1": "true"})[1] == pytest.approx(0.8, abs=1e-15)

    def test_posterior_example(self):
        net = build_temporal_noisy_or(NoisyOrSpec(q=(0.8, 0.4), leak=0.0, cause_priors=(0.5, 0.5)))
        # hand-expanded four-case sum: p(e | c1,c2) = 0, .4, .8, .88, each case weight .25
        p_e = 0.25 * (0.0 + 0.4 + 0.8 + 0.88)
        joint_c1 = 0.25 * (0.8 + 0.88)
        assert p_e == pytest.approx(0.52, abs=1e-15)
        assert joint_c1 == pytest.approx(0.42, abs=1e-15)
        post = enumerate_posterior(net, "c1", {"e2": "true"})
        assert post["true"] == pytest.approx(joint_c1 / p_e, abs=1e-12)
        assert post["true"] == pytest.approx(0.80769, abs=5e-6)
        assert post.evidence_probability == pytest.approx(0.52, abs=1e-12)

    def test_constraints(self):
        net = build_temporal_noisy_or(NoisyOrSpec(q=(0.3, 0.7), leak=0.2, cause_priors=(0.5, 0.5)))
        rows = net.table("e2").rows(2)
        assert net.parents("e2") == ("e1", "c2")
        assert rows[0].tolist() == [1.0, 0.0]          # e1 false, c2 false
        assert rows[1][1] == pytest.approx(0.7)       # e1 false, c2 true
        assert rows[2][1] == rows[3][1] == 1.0        # e1 true absorbs
        assert net.table("e0").table.tolist() == [0.8, 0.2]


class TestAdders:
    def test_all_off_point_mass(self):
        spec = NoisyAdderSpec(l=1, q=((0.2, 0.5, 0.3), (0.1, 0.6, 0.3)), leak=POINT0_L1, cause_priors=(0.5, 0.5))
        net = build_atemporal_noisy_adder(spec)
        p = enumerate_posterior(net, "e", {"c1": "false", "c2": "false"})
        assert p["0"] == 1.0

    def test_single_contribution(self):
        spec = NoisyAdderSpec(l=1, q=((0.2, 0.5, 0.3),), leak=POINT0_L1, cause_priors=(0.5,))
        net = build_atemporal_noisy_adder(spec)
        p = enumerate_posterior(net, "e", {"c1": "true"})
        assert [p["-1"], p["0"], p["1"]] == pytest.approx([0.2, 0.5, 0.3], abs=1e-15)

    def test_two_contributions(self):
        spec = NoisyAdderSpec(l=1, q=((0.2, 0.5, 0.3), (0.1, 0.6, 0.3)), leak=POINT0_L1, cause_priors=(0.5, 0.5))
        ev = {"c1": "true", "c2": "true"}
        oracle = convolve_effect(spec, {1: True, 2: True})
        e_lo = spec.effect_range()[0]
        assert oracle[0 - e_lo] == pytest.approx(0.2 * 0.3 + 0.5 * 0.6 + 0.3 * 0.1, abs=1e-15)
        for build_fn in (build_atemporal_noisy_adder, build_temporal_noisy_adder, build_explicit_temporal_adder):
            net = build_fn(spec)
            assert enumerate_posterior(net, net.annotations["effect"], ev)["0"] == pytest.approx(0.39, abs=1e-12)

    def test_ranges(self):
        spec = random_adder_spec(np.random.default_rng(3), 3, 1)
        net = build_temporal_noisy_adder(spec)
        assert net.var("e3").states == tuple(str(k) for k in range(-4, 5))
        for j in range(4):
            assert net.var(f"e{j}").states[0] == str(-(j + 1))
        atemporal = build_atemporal_noisy_adder(spec)
        assert atemporal.var("e").states == tuple(str(k) for k in range(-4, 5))

    @pytest.mark.parametrize("seed", range(6))
    def test_temporal_all_off_is_leak(self, seed):
        spec = random_adder_spec(np.random.default_rng(seed), 3, 2)
        net = build_temporal_noisy_adder(spec)
        p = effect_marginal(net, causes_ev({1: False, 2: False, 3: False}))
        lo = spec.effect_range()[0]
        embedded = np.zeros_like(p)
        embedded[-spec.l - lo: spec.l - lo + 1] = spec.leak
        np.testing.assert_allclose(p, embedded, atol=1e-15)

    @pytest.mark.parametrize("seed", range(6))
    def test_n1_temporal_equals_atemporal(self, seed):
        spec = random_adder_spec(np.random.default_rng(seed), 1, 2)
        np.testing.assert_allclose(
            effect_marginal(build_temporal_noisy_adder(spec)),
            effect_marginal(build_atemporal_noisy_adder(spec)),
            atol=1e-12,
        )

    def test_n3_l2_convolution_then_enumeration(self):
        spec = random_adder_spec(np.random.default_rng(20240), 3, 2)
        net = build_temporal_noisy_adder(spec)
        active = {1: True, 2: False, 3: True}
        conv = convolve_effect(spec, active)
        np.testing.assert_allclose(effect_marginal(net, causes_ev(active)), conv, atol=1e-12)
        np.testing.assert_allclose(effect_marginal(net), convolve_effect(spec), atol=1e-12)
        np.testing.assert_allclose(effect_marginal(build_atemporal_noisy_adder(spec)), convolve_effect(spec), atol=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_nonneg_saturation_matches_convolution(self, seed):
        spec = random_adder_spec(np.random.default_rng(seed), 3, 2, nonneg=True)
        for build_fn in (build_temporal_noisy_adder, build_atemporal_noisy_adder, build_explicit_temporal_adder):
            net = build_fn(spec)
            assert validate(net).ok
            np.testing.assert_allclose(effect_marginal(net), convolve_effect(spec), atol=1e-12)
            assert net.var(net.annotations["effect"]).states == ("0", "1", "2")


class TestExplicitAdder:
    @pytest.mark.parametrize("seed", range(10))
    def test_matches_temporal(self, seed):
        rng = np.random.default_rng(seed)
        spec = random_adder_spec(rng, int(rng.integers(1, 3)), int(rng.integers(1, 3)))
        explicit = build_explicit_temporal_adder(spec)
        temporal = build_temporal_noisy_adder(spec)
        assert joint_size(explicit) <= 2**16
        np.testing.assert_allclose(effect_marginal(explicit), effect_marginal(temporal), atol=1e-12)

    def test_sum_nodes_deterministic(self):
        spec = random_adder_spec(np.random.default_rng(1), 3, 2)
        net = build_explicit_temporal_adder(spec)
        for j in range(1, 4):
            assert net.parents(f"e{j}") == (f"e{j - 1}", f"i{j}")
            assert net.table(f"e{j}").is_deterministic(net.var(f"e{j}").card)

    def test_n1_collapses_to_atemporal(self):
        spec = random_adder_spec(np.random.default_rng(2), 1, 1)
        np.testing.assert_allclose(
            effect_marginal(build_explicit_temporal_adder(spec)),
            effect_marginal(build_atemporal_noisy_adder(spec)),
            atol=1e-15,
        )


class TestReordering:
    def test_fixture_permutation(self):
        assert reorder_causes(blood_disorder_fixture(), {2, 7}) == [1, 3, 4, 5, 6, 2, 7]

    def test_identity_cases(self):
        spec = random_noisy_or_spec(np.random.default_rng(0), 5)
        assert reorder_causes(spec, set()) == [1, 2, 3, 4, 5]
        assert reorder_causes(spec, {1, 2, 3, 4, 5}) == [1, 2, 3, 4, 5]

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            reorder_causes(random_noisy_or_spec(np.random.default_rng(0), 3), {4})

    def test_identity_permutation(self):
        spec = random_adder_spec(np.random.default_rng(0), 3, 1)
        assert apply_permutation(spec, [1, 2, 3]) == spec

    def test_malformed_permutation(self):
        spec = random_noisy_or_spec(np.random.default_rng(0), 3)
        with pytest.raises(SpecError):
            apply_permutation(spec, [1, 1, 2])

    def test_swap_noisy_or(self):
        spec = NoisyOrSpec(q=(0.3, 0.6), leak=0.05, cause_priors=(0.2, 0.7))
        swapped = apply_permutation(spec, [2, 1])
        assert swapped.q == (0.6, 0.3)
        for enc in ("temporal", "atemporal"):
            assert effect_marginal(build(swapped, enc))[1] == pytest.approx(effect_marginal(build(spec, enc))[1], abs=1e-12)

    def test_reverse_adder(self):
        spec = random_adder_spec(np.random.default_rng(9), 4, 1)
        rev = apply_permutation(spec, [4, 3, 2, 1])
        np.testing.assert_allclose(convolve_effect(rev), convolve_effect(spec), atol=1e-14)
        np.testing.assert_allclose(
            effect_marginal(build_temporal_noisy_adder(rev)), effect_marginal(build_temporal_noisy_adder(spec)), atol=1e-12
        )

    @pytest.mark.parametrize("seed", range(6))
    def test_posteriors_index_matched(self, seed):
        rng = np.random.default_rng(seed)
        spec = random_noisy_or_spec(rng, 4)
        perm = [int(p) + 1 for p in rng.permutation(4)]
        a, b = build_temporal_noisy_or(spec), build_temporal_noisy_or(apply_permutation(spec, perm))
        ea, eb = Enumerator(a), Enumerator(b)
        for k, orig in enumerate(perm, start=1):
            pa = ea.posterior(f"c{orig}", {"e4": "true"}).probs
            pb = eb.posterior(f"c{k}", {"e4": "true"}).probs
            np.testing.assert_allclose(pa, pb, atol=1e-12)


class TestNoisyOrProperties:
    @pytest.mark.parametrize("seed", range(20))
    def test_closed_form(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        spec = random_noisy_or_spec(rng, n)
        on = [j for j in range(1, n + 1) if rng.random() < 0.5]
        ev = causes_ev({j: j in on for j in range(1, n + 1)})
        expected = noisy_or_closed_form(spec, on)
        for builder in (build_temporal_noisy_or, build_atemporal_noisy_or, build_naive_noisy_or):
            assert effect_marginal(builder(spec), ev)[1] == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(
        q=st.lists(st.floats(0, 1), min_size=1, max_size=5),
        leak=st.floats(0, 1),
        j=st.integers(0, 4),
        bump=st.floats(0, 1),
    )
    def test_monotone_in_q(self, q, leak, j, bump):
        j %= len(q)
        spec = NoisyOrSpec(q=tuple(q), leak=leak, cause_priors=(0.5,) * len(q))
        raised = list(q)
        raised[j] = q[j] + (1 - q[j]) * bump
        higher = NoisyOrSpec(q=tuple(raised), leak=leak, cause_priors=spec.cause_priors)
        n = len(q)
        lo, _ = eliminate(build_temporal_noisy_or(spec), f"e{n}")
        hi, _ = eliminate(build_temporal_noisy_or(higher), f"e{n}")
        assert hi["true"] >= lo["true"] - 1e-15

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_zero_case(self, n):
        spec = NoisyOrSpec(q=(0.0,) * n, leak=0.0, cause_priors=(0.5,) * n)
        for builder in (build_temporal_noisy_or, build_atemporal_noisy_or):
            net = builder(spec)
            assert effect_marginal(net)[1] == 0.0
            assert eliminate(net, net.annotations["effect"])[0]["true"] == 0.0


class TestChainIndependence:
    @pytest.mark.parametrize("n", [3, 4])
    def test_prefix_independent_of_later_causes(self, n):
        spec = random_noisy_or_spec(np.random.default_rng(n), n)
        net = build_temporal_noisy_or(spec)
        en = Enumerator(net)
        for j in range(1, n):
            prefix = [f"c{i}" for i in range(1, j + 1)]
            chain = [f"e{i}" for i in range(j + 1)]
            for k in range(j + 1, n + 1):
                assert d_separated(net, prefix, [f"c{k}"], [])
                assert d_separated(net, prefix, [f"c{k}"], chain)
                assert conditional_gap(net.names, en.joint, prefix, [f"c{k}"], chain) <= 1e-12
            # once a later chain node is observed the later causes couple to the prefix
            assert not d_separated(net, prefix, [f"c{n}"], [f"e{n}"])


@pytest.mark.parametrize("seed", range(8))
def test_adder_support(seed):
    rng = np.random.default_rng(seed)
    spec = random_adder_spec(rng, 3, int(rng.integers(1, 3)))
    net = build_temporal_noisy_adder(spec)
    en = Enumerator(net)
    for j in range(spec.n + 1):
        p = en.posterior(f"e{j}").probs
        values = np.array([int(s) for s in net.var(f"e{j}").states])
        assert np.all(p[np.abs(values) > (j + 1) * spec.l] == 0)
        assert values.min() == -(j + 1) * spec.l and values.max() == (j + 1) * spec.l
