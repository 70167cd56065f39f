import io

import numpy as np
import pytest

import mvne
from mvne.graph import ParseError

from conftest import make_adjacency


class TestLoadEdgeList:
    def test_symmetrization_doubles_unit_edges(self):
        adj, reg = make_adjacency("a\tb\nb\tc\n")
        assert adj.n == 3
        assert adj.nnz == 4
        assert adj.total_weight == 4.0

    def test_duplicate_lines_merge_weights(self):
        adj, _ = make_adjacency("a\tb\t2.0\na\tb\t1.0\n")
        assert adj.nnz == 2
        assert adj.total_weight == 6.0
        assert adj.mat[0, 1] == 3.0

    def test_empty_stream(self):
        reg = mvne.NodeRegistry()
        adj, reg = mvne.load_edge_list(io.StringIO(""), reg)
        assert adj.n == 0
        assert adj.nnz == 0
        assert adj.total_weight == 0.0

    def test_self_loop_single_diagonal_entry(self):
        adj, _ = make_adjacency("a\ta\t2.5\na\tb\n")
        assert adj.mat[0, 0] == 2.5
        assert adj.total_weight == 2.5 + 2.0
        assert adj.edge_count() == 2

    def test_comments_and_blank_lines_skipped(self):
        adj, _ = make_adjacency("# header\n\na\tb\n  \n# tail\n")
        assert adj.nnz == 2

    def test_registry_first_appearance_order(self):
        _, reg = make_adjacency("x\ty\nz\tx\n")
        assert reg.names == ["x", "y", "z"]

    def test_malformed_line_reports_number(self):
        with pytest.raises(ParseError, match="line 2"):
            make_adjacency("a\tb\na\tb\tc\td\n")

    def test_non_positive_weight_rejected(self):
        with pytest.raises(ParseError, match="non-positive"):
            make_adjacency("a\tb\t0\n")
        with pytest.raises(ParseError, match="non-positive"):
            make_adjacency("a\tb\t-1.5\n")

    def test_unweighted_flag_rejects_weight_column(self):
        reg = mvne.NodeRegistry()
        with pytest.raises(ParseError, match="weight column"):
            mvne.load_edge_list(io.StringIO("a\tb\t2.0\n"), reg, weighted=False)

    def test_space_separated_fallback(self):
        adj, _ = make_adjacency("a b 2.0\nb c\n")
        assert adj.total_weight == 2 * 2.0 + 2 * 1.0


class TestRoundTrip:
    def test_write_then_load_identical(self):
        adj, reg = make_adjacency("a\tb\t0.123456789012345\nb\tc\t7\nc\tc\t2\n")
        buf = io.StringIO()
        mvne.write_edge_list(adj, reg, buf)
        buf.seek(0)
        again, reg2 = mvne.load_edge_list(buf, reg)
        assert reg2.names == reg.names
        assert np.array_equal(adj.indptr, again.indptr)
        assert np.array_equal(adj.indices, again.indices)
        assert np.array_equal(adj.values, again.values)

    def test_random_graphs_round_trip_and_symmetry(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, 30))
            m = int(rng.integers(1, 60))
            lines = []
            for _ in range(m):
                i, j = rng.integers(0, n, 2)
                w = float(rng.uniform(0.1, 5.0))
                lines.append(f"n{i}\tn{j}\t{w!r}")
            adj, reg = make_adjacency("\n".join(lines) + "\n")
            assert adj.is_symmetric()
            adj.validate()
            assert abs(adj.total_weight - adj.values.sum()) <= 1e-12 * max(1.0, adj.total_weight)
            buf = io.StringIO()
            mvne.write_edge_list(adj, reg, buf)
            buf.seek(0)
            again, _ = mvne.load_edge_list(buf, reg)
            assert np.array_equal(adj.values, again.values)
            assert np.array_equal(adj.indices, again.indices)


class TestLabels:
    def test_basic_multilabel(self):
        _, reg = make_adjacency("a\tb\n")
        store = mvne.load_labels(io.StringIO("a\tx,y\n"), reg)
        names = {store.label_name(l) for l in store.labels_of(0)}
        assert names == {"x", "y"}

    def test_unknown_node_rejected(self):
        _, reg = make_adjacency("a\tb\n")
        with pytest.raises(ParseError, match="'z'"):
            mvne.load_labels(io.StringIO("z\tq\n"), reg)

    def test_repeated_lines_union(self):
        _, reg = make_adjacency("a\tb\n")
        store = mvne.load_labels(io.StringIO("a\tx\na\ty\n"), reg)
        names = {store.label_name(l) for l in store.labels_of(0)}
        assert names == {"x", "y"}

    def test_unlabeled_node_empty_set(self):
        _, reg = make_adjacency("a\tb\n")
        store = mvne.load_labels(io.StringIO("a\tx\n"), reg)
        assert store.labels_of(1) == frozenset()
        assert store.labeled_nodes() == [0]


class TestMultiView:
    def test_shared_registry_union(self):
        g = mvne.build_multiview([
            ("v1", io.StringIO("a\tb\n")),
            ("v2", io.StringIO("b\tc\n")),
        ])
        assert g.n == 3
        assert list(g.active_counts()) == [2, 2]
        for v in g.views:
            assert v.n == 3

    def test_single_view(self):
        g = mvne.build_multiview([("only", io.StringIO("a\tb\n"))])
        assert g.k == 1
        assert g.views[0].total_weight == 2.0

    def test_empty_manifest_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            mvne.build_multiview([])

    def test_flickr_shaped_view_sizes(self):
        # five chain views over nested prefixes of one identifier space:
        # active counts equal the prescribed sizes, union is the largest
        sizes = [2358, 2724, 4061, 1341, 6163]
        manifest = []
        for v, size in enumerate(sizes):
            lines = "\n".join(f"u{i}\tu{i + 1}" for i in range(size - 1))
            manifest.append((f"view{v}", io.StringIO(lines + "\n")))
        g = mvne.build_multiview(manifest)
        assert g.n == max(sizes)
        assert list(g.active_counts()) == sizes


class TestViewStats:
    def test_triangle(self, triangle):
        adj, reg = triangle
        g = mvne.MultiViewGraph(registry=reg, view_names=["t"], views=[adj])
        (row,) = mvne.view_stats(g)
        assert row["nodes"] == 3
        assert row["edges"] == 3

    def test_star_degrees(self):
        adj, reg = make_adjacency("h\ta\nh\tb\nh\tc\nh\td\n")
        degs = sorted(adj.degrees(), reverse=True)
        assert degs == [4, 1, 1, 1, 1]
        g = mvne.MultiViewGraph(registry=reg, view_names=["s"], views=[adj])
        (row,) = mvne.view_stats(g)
        assert row["degree"]["max"] == 4
        assert row["degree"]["min"] == 1

    def test_sbm_edge_count_matches_generator(self):
        spec = mvne.SbmSpec(n=80, communities=3, p_in=0.4, p_out=0.05, views=2, seed=11)
        graph, _ = mvne.generate_multiview_sbm(spec)
        for row, adj in zip(mvne.view_stats(graph), graph.views):
            # independent recount from the stored structure
            rows_, cols_ = adj.coo_rows, adj.indices
            undirected = {(min(i, j), max(i, j)) for i, j in zip(rows_, cols_)}
            assert row["edges"] == len(undirected)
