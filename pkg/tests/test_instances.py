import warnings

import numpy as np
import pytest
from scipy.cluster.vq import kmeans2

from wtsp.core import Instance, ValidationError, audit_metric, weighted_cost
from wtsp.instances import (
    GeneratorSpec,
    InstanceWarning,
    ParseError,
    WeightConfig,
    assign_weights,
    dumps_instance,
    generate_instance,
    generate_placement,
    loads_instance,
    read_instance,
    read_manifest,
    read_tour,
    suite_specs,
    write_instance,
    write_manifest,
    write_tour,
)


class TestPlacements:
    def test_rue_bounds_and_mean(self):
        pts = generate_placement(GeneratorSpec(1000, "rue", "C1", 0.0, 3, 0))
        assert pts.min() >= 0 and pts.max() <= 1000
        assert np.all(pts == np.round(pts))
        sigma = 1000 / np.sqrt(12) / np.sqrt(1000)
        assert np.all(np.abs(pts.mean(axis=0) - 500) < 3 * sigma)

    def test_netgen_two_clusters(self):
        pts = generate_placement(GeneratorSpec(500, "netgen", "C1", 0.0, 5, 0))
        assert pts.min() >= 0 and pts.max() <= 1000
        centers, labels = kmeans2(pts, 2, seed=1, minit="++")
        radius = np.mean(np.linalg.norm(pts - centers[labels], axis=1))
        assert np.linalg.norm(centers[0] - centers[1]) > 4 * radius

    def test_tspgen_zero_rounds_is_rue(self):
        spec = GeneratorSpec(200, "tspgen", "C1", 0.0, 9, 0)
        rue = GeneratorSpec(200, "rue", "C1", 0.0, 9, 0)
        assert np.array_equal(generate_placement(spec, tspgen_rounds=0), generate_placement(rue))

    def test_tspgen_in_box(self):
        pts = generate_placement(GeneratorSpec(300, "tspgen", "C1", 0.0, 2, 0))
        assert pts.min() >= 0 and pts.max() <= 1000
        assert np.all(pts == np.round(pts))

    @pytest.mark.parametrize("placement", ["rue", "netgen", "tspgen"])
    def test_deterministic_and_metric(self, placement):
        spec = GeneratorSpec(60, placement, "C2", 4, 17, 18)
        a, b = generate_instance(spec), generate_instance(spec)
        assert np.array_equal(a.coords, b.coords) and np.array_equal(a.weights, b.weights)
        assert audit_metric(a.distances)


class TestWeights:
    def test_c1_zero_is_tsp(self):
        w = assign_weights(8, WeightConfig("C1", 0.0), 1)
        assert w.tolist() == [1] + [0] * 7

    def test_c1_constant(self):
        assert assign_weights(5, WeightConfig("C1", 0.3), 1).tolist() == [1, 0.3, 0.3, 0.3, 0.3]

    def test_c2_frequency(self):
        w = assign_weights(10_000, WeightConfig("C2", 2), 4)[1:]
        assert set(np.unique(w)) == {1, 2}
        assert abs(np.mean(w == 1) - 0.5) < 0.02

    def test_c3_support(self):
        w = assign_weights(500, WeightConfig("C3", 1), 4)
        assert set(np.unique(w[1:])) == {0, 1} and w[0] == 1

    def test_c2_range(self):
        w = assign_weights(2000, WeightConfig("C2", 10), 4)
        assert w.min() == 1 and w.max() == 10

    def test_invalid_configs(self):
        with pytest.raises(ValidationError):
            WeightConfig("C1", 1.5)
        with pytest.raises(ValidationError):
            WeightConfig("C2", 2.5)
        with pytest.raises(ValidationError):
            WeightConfig("C4", 1)
        with pytest.raises(ValidationError):
            GeneratorSpec(1, "rue", "C1", 0.0, 0, 0)
        with pytest.raises(ValidationError):
            GeneratorSpec(5, "grid", "C1", 0.0, 0, 0)


class TestSuite:
    def test_size(self):
        assert sum(1 for _ in suite_specs()) == 45_000

    def test_ids_unique(self):
        ids = [s.instance_id for s in suite_specs(sizes=(25,), placements=("rue",))]
        assert len(ids) == len(set(ids)) == 30 * 100

    def test_manifest_roundtrip(self, tmp_path):
        specs = list(suite_specs(sizes=(25,), placements=("netgen",), replications=2))
        path = tmp_path / "m.csv"
        assert write_manifest(path, specs) == len(specs)
        assert read_manifest(path) == specs


class TestTsplib:
    def test_roundtrip_c2(self, tmp_path):
        inst = generate_instance(GeneratorSpec(40, "rue", "C2", 5, 1, 2))
        path = tmp_path / "x.wtsp"
        write_instance(inst, path)
        back = read_instance(path)
        assert np.array_equal(back.coords, inst.coords)
        assert np.array_equal(back.weights, inst.weights)
        assert back.name == inst.name and back.start == 0

    def test_roundtrip_matrix_fractional(self):
        rng = np.random.default_rng(0)
        xy = rng.uniform(0, 1, (6, 2))
        m = np.linalg.norm(xy[:, None] - xy[None], axis=2)
        inst = Instance.from_matrix(m, [1, 0.1, 0.7, 2, 0, 1 / 3], start=2)
        back = loads_instance(dumps_instance(inst))
        assert np.array_equal(back.matrix, inst.matrix)
        assert np.array_equal(back.weights, inst.weights)
        assert back.start == 2
        t = (2, 0, 1, 3, 4, 5)
        assert weighted_cost(back, t) == weighted_cost(inst, t)

    def test_non_metric_flag_roundtrip(self):
        inst = Instance.from_matrix([[0, 1, 10], [1, 0, 1], [10, 1, 0]], metric=False)
        assert not loads_instance(dumps_instance(inst)).metric

    def test_start_weight_flagged(self):
        text = ("NAME : t\nTYPE : WTSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D_REAL\nNODE_COORD_SECTION\n"
                "1 0 0\n2 1 0\n3 0 1\nNODE_WEIGHT_SECTION\n1 2\n2 1\n3 1\nEOF\n")
        inst = loads_instance(text)
        assert "start_weight_not_one" in inst.notes
        assert inst.weights.tolist() == [2, 1, 1]

    def test_classic_tsplib_unit_weights(self):
        text = ("NAME : tiny\nTYPE : TSP\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
                "1 0 0\n2 3 0\n3 3 4\n4 0 4\nEOF\n")
        with pytest.warns(InstanceWarning):
            inst = loads_instance(text)
        assert inst.weights.tolist() == [1, 1, 1, 1]
        assert "weights_missing" in inst.notes
        assert inst.distances[0, 2] == 5

    def test_nint_rounding(self):
        text = ("NAME : r\nTYPE : TSP\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
                "1 0 0\n2 1 1\nEOF\n")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", InstanceWarning)
            assert loads_instance(text, euc2d_rounding="nint").distances[0, 1] == 1
            assert loads_instance(text).distances[0, 1] == pytest.approx(np.sqrt(2))

    @pytest.mark.parametrize("text, line", [
        ("DIMENSION : 2\nNODE_COORD_SECTION\n1 0 0\n2 x 1\nEOF\n", 4),
        ("DIMENSION : 2\nNODE_COORD_SECTION\n1 0 0\n1 1 1\nEOF\n", 4),
        ("DIMENSION : 2\nNODE_COORD_SECTION\n1 0\nEOF\n", 3),
    ])
    def test_parse_errors_carry_line(self, text, line):
        with pytest.raises(ParseError) as exc:
            loads_instance(text)
        assert exc.value.line == line

    def test_missing_dimension(self):
        with pytest.raises(ParseError):
            loads_instance("NAME : x\nEOF\n")

    def test_incomplete_weights(self):
        text = ("DIMENSION : 2\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nNODE_WEIGHT_SECTION\n1 1\nEOF\n")
        with pytest.raises(ParseError):
            loads_instance(text)

    def test_tour_roundtrip(self, tmp_path):
        path = tmp_path / "t.tour"
        write_tour((0, 3, 1, 2), path, name="x")
        assert read_tour(path) == (0, 3, 1, 2)
        assert "TOUR_SECTION\n1\n4\n2\n3\n-1" in path.read_text()

    def test_tour_dimension_mismatch(self, tmp_path):
        path = tmp_path / "t.tour"
        path.write_text("DIMENSION : 3\nTOUR_SECTION\n1\n2\n-1\nEOF\n")
        with pytest.raises(ParseError):
            read_tour(path)
