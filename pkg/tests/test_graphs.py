import itertools

import numpy as np
import pytest

from attnet.errors import ParameterError
from attnet.graphs import (
    GeneratorConfig,
    NormalWeights,
    ParetoWeights,
    UniformWeights,
    UnweightedGraph,
    assign_weights,
    gen_erdos_renyi,
    gen_preferential_attachment,
    gen_small_world,
    generate,
    weight_distribution,
)


def no_self_loops_sorted(graph):
    return all(0 <= i < j < graph.node_count for i, j in graph.edges)


class TestPreferentialAttachment:
    def test_two_nodes_single_edge(self):
        g = gen_preferential_attachment(2, (1, 1), (0.5, 0.5), np.random.default_rng(0))
        assert g.edges == frozenset({(0, 1)})

    def test_paper_scale_edge_counts(self):
        # 11 nodes, m in [4, 6]: sum of min(m, available) over growth steps
        rng = np.random.default_rng(1)
        for _ in range(50):
            g = gen_preferential_attachment(11, (4, 6), (0.30, 0.70), rng)
            assert g.node_count == 11
            assert 34 <= g.edge_count <= 51

    def test_connected_by_construction(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            g = gen_preferential_attachment(8, (1, 2), (0.0, 2.0), rng)
            reach = {0}
            frontier = [0]
            adj = {i: set() for i in range(8)}
            for i, j in g.edges:
                adj[i].add(j)
                adj[j].add(i)
            while frontier:
                u = frontier.pop()
                for v in adj[u] - reach:
                    reach.add(v)
                    frontier.append(v)
            assert reach == set(range(8))

    def test_flat_exponent_gives_uniform_attachment(self):
        # alpha = 0 levels the attachment weights: deg**0 + 1 is constant,
        # so each new node picks uniformly among existing nodes
        rng = np.random.default_rng(3)
        runs = 10_000
        hits_node2 = np.zeros(2)   # node 2 chooses between {0, 1}
        hits_node4 = np.zeros(4)   # node 4 chooses among {0, 1, 2, 3}
        for _ in range(runs):
            g = gen_preferential_attachment(5, (1, 1), (0.0, 0.0), rng)
            for i, j in g.edges:
                if j == 2:
                    hits_node2[i] += 1
                if j == 4:
                    hits_node4[i] += 1
        assert np.all(np.abs(hits_node2 / runs - 0.5) < 0.02)
        assert np.all(np.abs(hits_node4 / runs - 0.25) < 0.02)

    def test_high_exponent_prefers_hubs(self):
        rng = np.random.default_rng(4)
        runs = 4000
        hub_hits = 0
        for _ in range(runs):
            g = gen_preferential_attachment(4, (1, 1), (2.0, 2.0), rng)
            deg = g.degrees()
            # last node should usually attach to the current highest-degree node
            targets = [i for i, j in g.edges if j == 3]
            if deg[targets[0]] == deg[:3].max():
                hub_hits += 1
        assert hub_hits / runs > 0.55

    def test_no_self_loops_or_duplicates_many_seeds(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            g = gen_preferential_attachment(7, (2, 3), (0.0, 1.5), rng)
            assert no_self_loops_sorted(g)

    def test_invalid_ranges_rejected(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ParameterError):
            gen_preferential_attachment(5, (0, 2), (0.3, 0.7), rng)
        with pytest.raises(ParameterError):
            gen_preferential_attachment(5, (1, 5), (0.3, 0.7), rng)
        with pytest.raises(ParameterError):
            gen_preferential_attachment(5, (1, 2), (0.3, 2.5), rng)
        with pytest.raises(ParameterError):
            gen_preferential_attachment(5, (2, 1), (0.3, 0.7), rng)


class TestSmallWorld:
    def test_pure_lattice(self):
        g = gen_small_world(6, (2, 2), (0.0, 0.0), np.random.default_rng(0))
        assert g.edge_count == 12
        assert np.all(g.degrees() == 4)
        assert (0, 1) in g.edges and (0, 2) in g.edges

    def test_paper_scale_edge_count(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            g = gen_small_world(11, (3, 4), (0.05, 0.10), rng)
            n_per_side = g.edge_count / 11
            assert n_per_side in (3.0, 4.0)

    def test_rewiring_preserves_edge_count(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            g = gen_small_world(10, (2, 2), (1.0, 1.0), rng)
            assert g.edge_count == 20
            assert no_self_loops_sorted(g)

    def test_rewire_targets_uniform_over_eligible_nodes(self):
        # p=1, n=1 on 8 nodes: from the fresh lattice, source 0's eligible
        # targets are the 5 non-self non-neighbour nodes, each drawn at 1/5
        from attnet.graphs import _rewire_target

        rng = np.random.default_rng(3)
        adj = {i: {(i - 1) % 8, (i + 1) % 8} for i in range(8)}
        runs = 10_000
        counts = np.zeros(8)
        for _ in range(runs):
            counts[_rewire_target(adj, 0, 8, rng)] += 1
        freqs = counts / runs
        assert freqs[0] == 0 and freqs[1] == 0 and freqs[7] == 0
        assert np.all(np.abs(freqs[2:7] - 0.2) < 0.02)

    def test_full_rewiring_moves_most_edges(self):
        rng = np.random.default_rng(30)
        lattice = {(i, (i + 1) % 8) for i in range(8)}
        lattice = {(min(a, b), max(a, b)) for a, b in lattice}
        moved = []
        for _ in range(500):
            g = gen_small_world(8, (1, 1), (1.0, 1.0), rng)
            moved.append(len(g.edges - lattice) / 8)
        assert np.mean(moved) > 0.8

    def test_no_self_loops_or_duplicates_many_seeds(self):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            g = gen_small_world(9, (1, 4), (0.0, 1.0), rng)
            assert no_self_loops_sorted(g)

    def test_neighbour_range_capacity(self):
        with pytest.raises(ParameterError):
            gen_small_world(6, (3, 3), (0.1, 0.1), np.random.default_rng(0))


class TestErdosRenyi:
    def test_exact_edge_count_range(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            g = gen_erdos_renyi(11, (30, 45), rng)
            assert 30 <= g.edge_count <= 45

    def test_complete_graph(self):
        g = gen_erdos_renyi(11, (55, 55), np.random.default_rng(1))
        assert g.edge_count == 55
        assert g.edges == frozenset(itertools.combinations(range(11), 2))

    def test_uniform_inclusion_probability(self):
        # 4 nodes, 3 of 6 pairs: each pair present with probability 1/2
        rng = np.random.default_rng(2)
        runs = 10_000
        counts = {p: 0 for p in itertools.combinations(range(4), 2)}
        for _ in range(runs):
            g = gen_erdos_renyi(4, (3, 3), rng)
            for e in g.edges:
                counts[e] += 1
        for pair, c in counts.items():
            assert abs(c / runs - 0.5) < 0.02, pair

    def test_range_capacity(self):
        with pytest.raises(ParameterError):
            gen_erdos_renyi(4, (5, 7), np.random.default_rng(0))

    def test_zero_edges_allowed(self):
        g = gen_erdos_renyi(5, (0, 0), np.random.default_rng(0))
        assert g.edge_count == 0


class TestAssignWeights:
    def test_uniform_weights_in_range(self):
        rng = np.random.default_rng(0)
        g = gen_erdos_renyi(11, (40, 40), rng)
        wg = assign_weights(g, UniformWeights(0.01, 0.30), rng)
        values = [w for _, _, w in wg.edge_list()]
        assert len(values) == 40
        assert all(0.01 < w < 0.30 for w in values)

    def test_zero_edge_graph_gives_zero_matrix(self):
        g = UnweightedGraph(4, frozenset())
        wg = assign_weights(g, UniformWeights(), np.random.default_rng(0))
        assert np.all(wg.weights == 0)

    def test_pareto_mean_matches_formula(self):
        # mean of Pareto(shape a, scale b) is a*b/(a-1) = 0.15
        rng = np.random.default_rng(1)
        draws = ParetoWeights(3.0, 0.10).sample(rng, 100_000)
        assert np.all(draws >= 0.10)
        assert draws.mean() == pytest.approx(0.15, abs=0.005)

    def test_normal_weights_strictly_positive(self):
        rng = np.random.default_rng(2)
        draws = NormalWeights(0.05, 0.2).sample(rng, 10_000)  # heavy rejection regime
        assert np.all(draws > 0)

    def test_symmetry_and_zero_diagonal(self):
        rng = np.random.default_rng(3)
        g = gen_small_world(11, (3, 4), (0.05, 0.10), rng)
        wg = assign_weights(g, NormalWeights(), rng)
        assert np.array_equal(wg.weights, wg.weights.T)
        assert np.all(np.diag(wg.weights) == 0)

    def test_distribution_parameter_validation(self):
        with pytest.raises(ParameterError):
            UniformWeights(0.0, 0.3).validate()
        with pytest.raises(ParameterError):
            ParetoWeights(1.0, 0.1).validate()
        with pytest.raises(ParameterError):
            NormalWeights(0.15, 0.0).validate()
        with pytest.raises(ParameterError):
            weight_distribution("exponential")


class TestDeterminism:
    @pytest.mark.parametrize("algorithm", ["preferential_attachment", "small_world", "erdos_renyi"])
    def test_same_seed_bit_identical(self, algorithm):
        config = GeneratorConfig(algorithm=algorithm, weights=UniformWeights())
        a = generate(config, np.random.default_rng(123))
        b = generate(config, np.random.default_rng(123))
        assert np.array_equal(a.weights, b.weights)

    def test_different_seeds_differ(self):
        config = GeneratorConfig()
        a = generate(config, np.random.default_rng(1))
        b = generate(config, np.random.default_rng(2))
        assert not np.array_equal(a.weights, b.weights)


class TestGeneratorConfig:
    def test_round_trip_through_dict(self):
        config = GeneratorConfig(algorithm="small_world", node_count=9,
                                 neighbour_range=(2, 3), rewire_p_range=(0.0, 0.2),
                                 weights=ParetoWeights(2.5, 0.2))
        back = GeneratorConfig.from_dict(config.to_dict())
        assert back == config

    def test_unknown_algorithm_rejected(self):
        with pytest.raises(ParameterError):
            GeneratorConfig(algorithm="configuration_model")

    def test_dict_weights_parsed(self):
        d = {"algorithm": "erdos_renyi", "node_count": 7, "edge_count_range": [5, 10],
             "weights": {"kind": "normal", "mean": 0.2, "sd": 0.05}}
        config = GeneratorConfig.from_dict(d)
        assert config.weights == NormalWeights(0.2, 0.05)
        assert config.edge_count_range == (5, 10)
