import pytest

from tpad.netlist import Gate, check_equivalence, random_netlist
from tpad.switchbox import (
    CROSSED,
    PARALLEL,
    ConfigCoverageError,
    NoIncorrectConfigsError,
    ObfuscatedNetlist,
    Switchbox,
    SwitchboxError,
    UnsatisfiableError,
    apply_config,
    count_cone_switchboxes,
    degeneracy_scan,
    format_config,
    insert_switchboxes,
    parse_config,
    parse_obfuscated,
    serialize_obfuscated,
)


def adder_with_manual_sb(full_adder):
    """The adder with one switchbox across the (x1->s, cin->g2) wires.

    Parallel keeps the original function; crossed swaps which value feeds
    the sum XOR and the carry AND, computing a different function.
    """
    sb = Switchbox(0, (3, 2), (8, 9))
    gates = (
        Gate(3, "XOR", (0, 1)),
        Gate(4, "XOR", (8, 2)),
        Gate(5, "AND", (0, 1)),
        Gate(6, "AND", (3, 9)),
        Gate(7, "OR", (5, 6)),
    )
    names = {0: "a", 1: "b", 2: "cin", 3: "x1", 4: "s", 5: "g1", 6: "g2", 7: "cout"}
    return ObfuscatedNetlist(
        "adder.sb", (0, 1, 2), (4, 7), gates, (sb,), {0: PARALLEL}, names
    )


def degenerate_sb_adder(full_adder):
    """A switchbox across the two inputs of the commutative first XOR/AND pair.

    Swapping (a, b) into XOR(a, b) and AND(a, b) changes nothing: both
    configurations realize the adder, the textbook degenerate insertion.
    """
    sb = Switchbox(0, (0, 1), (8, 9))
    gates = (
        Gate(3, "XOR", (8, 9)),
        Gate(4, "XOR", (3, 2)),
        Gate(5, "AND", (8, 9)),
        Gate(6, "AND", (3, 2)),
        Gate(7, "OR", (5, 6)),
    )
    names = {0: "a", 1: "b", 2: "cin", 4: "s", 7: "cout"}
    return ObfuscatedNetlist(
        "adder.degen", (0, 1, 2), (4, 7), gates, (sb,), {0: PARALLEL}, names
    )


class TestSwitchboxType:
    def test_wires_must_be_distinct(self):
        with pytest.raises(SwitchboxError):
            Switchbox(0, (1, 1), (2, 3))


class TestApplyConfig:
    def test_parallel_is_original(self, full_adder):
        obf = adder_with_manual_sb(full_adder)
        assert check_equivalence(apply_config(obf, {0: PARALLEL}), full_adder).equivalent

    def test_crossed_differs(self, full_adder):
        obf = adder_with_manual_sb(full_adder)
        v = check_equivalence(apply_config(obf, {0: CROSSED}), full_adder)
        assert not v.equivalent and v.counterexample is not None

    def test_zero_sbs_identity(self, full_adder):
        obf = ObfuscatedNetlist(
            "plain", full_adder.inputs, full_adder.outputs, full_adder.gates,
            (), {}, full_adder.wire_names,
        )
        assert check_equivalence(apply_config(obf, {}), full_adder).equivalent

    def test_config_coverage_enforced(self, full_adder):
        obf = adder_with_manual_sb(full_adder)
        with pytest.raises(ConfigCoverageError):
            apply_config(obf, {})
        with pytest.raises(ConfigCoverageError):
            apply_config(obf, {0: PARALLEL, 1: CROSSED})


class TestInsertion:
    def test_alu2_reaches_two_per_cone(self, alu2):
        obf = insert_switchboxes(alu2, t=2, rng_seed=5)
        assert all(c >= 2 for c in obf.per_output_sb_count)
        assert check_equivalence(apply_config(obf, obf.intended), alu2).equivalent

    def test_every_retained_sb_non_degenerate(self, alu2):
        obf = insert_switchboxes(alu2, t=2, rng_seed=5)
        baseline = apply_config(obf, obf.intended)
        for sb in obf.switchboxes:
            flipped = dict(obf.intended)
            flipped[sb.id] = CROSSED if flipped[sb.id] == PARALLEL else PARALLEL
            assert not check_equivalence(apply_config(obf, flipped), baseline).equivalent

    def test_deterministic_under_seed(self, alu2):
        a = insert_switchboxes(alu2, t=2, rng_seed=9)
        b = insert_switchboxes(alu2, t=2, rng_seed=9)
        assert serialize_obfuscated(a) == serialize_obfuscated(b)
        assert a.intended == b.intended

    def test_unsatisfiable_reports_best_counts(self, full_adder):
        # the 5-gate adder has no disjoint matching neighborhoods at all
        with pytest.raises(UnsatisfiableError) as e:
            insert_switchboxes(full_adder, t=2, rng_seed=1, max_iterations=40)
        assert len(e.value.per_output_counts) == 2

    def test_config_space_is_all_sbs(self, alu2):
        obf = insert_switchboxes(alu2, t=2, rng_seed=5)
        assert set(obf.intended) == {sb.id for sb in obf.switchboxes}


class TestConeCounts:
    def test_single_sb_feeding_both_outputs(self, full_adder):
        obf = adder_with_manual_sb(full_adder)
        # sb output 8 feeds the sum xor; output 9 feeds the carry and
        assert count_cone_switchboxes(obf, 0) == 1
        assert count_cone_switchboxes(obf, 1) == 1

    def test_zero_sb_netlist(self, full_adder):
        obf = ObfuscatedNetlist(
            "plain", full_adder.inputs, full_adder.outputs, full_adder.gates,
            (), {}, full_adder.wire_names,
        )
        assert count_cone_switchboxes(obf, 0) == 0

    def test_index_range(self, full_adder):
        obf = adder_with_manual_sb(full_adder)
        with pytest.raises(IndexError):
            count_cone_switchboxes(obf, 2)


class TestDegeneracyScan:
    def test_injected_degenerate_sb_found(self, full_adder):
        obf = degenerate_sb_adder(full_adder)
        report = degeneracy_scan(obf, 50, rng_seed=3)
        assert report.fraction_equivalent == 1.0
        assert report.hits  # offending configs are reported

    def test_clean_instance_scans_zero(self):
        net = random_netlist(10, 30, 3, rng_seed=9)
        obf = insert_switchboxes(net, t=2, rng_seed=2, min_switchboxes=16)
        assert obf.n_switchboxes >= 16
        report = degeneracy_scan(obf, 2000, rng_seed=5)
        assert report.fraction_equivalent == 0.0

    def test_no_incorrect_configs_error(self, full_adder):
        obf = ObfuscatedNetlist(
            "plain", full_adder.inputs, full_adder.outputs, full_adder.gates,
            (), {}, full_adder.wire_names,
        )
        with pytest.raises(NoIncorrectConfigsError):
            degeneracy_scan(obf, 10, rng_seed=0)


class TestFiles:
    def test_obfuscated_round_trip(self, alu2):
        obf = insert_switchboxes(alu2, t=2, rng_seed=7)
        text = serialize_obfuscated(obf)
        cfg = parse_config(format_config(obf.intended))
        again = parse_obfuscated(text, cfg)
        assert check_equivalence(
            apply_config(again, again.intended), apply_config(obf, obf.intended)
        ).equivalent
        assert serialize_obfuscated(again) == text

    def test_config_file_round_trip(self):
        cfg = {0: PARALLEL, 3: CROSSED, 7: PARALLEL}
        assert parse_config(format_config(cfg)) == cfg
