"""Properties the bundled systems must satisfy as datasets."""

import math

import numpy as np
import pytest

from conftest import approx_for, bundled
from mwlab.attractor import coding_map_prefix, invariance_residual
from mwlab.conditions import branch_points
from mwlab.geometry import hausdorff_distance
from mwlab.graph import is_irreducible, paths_from, vertex_matrix
from mwlab.ktheory import IntMatrix, graph_algebra_ktheory

TAU = (1 + math.sqrt(5)) / 2

ALL = ["binary_ifs", "cantor_ifs", "duplicate_map",
       "penrose", "squares_z2", "two_part_dust"]


class TestStandingAssumptions:
    @pytest.mark.parametrize("name", ALL)
    def test_irreducible(self, name):
        assert is_irreducible(bundled(name).graph)

    def test_vertex_matrices(self):
        assert vertex_matrix(bundled("squares_z2").graph) == \
            IntMatrix([[3, 1], [1, 3]])
        assert vertex_matrix(bundled("penrose").graph) == \
            IntMatrix([[2, 1], [1, 1]])
        assert vertex_matrix(bundled("two_part_dust").graph) == \
            IntMatrix([[1, 1], [1, 1]])

    def test_stated_graph_ktheory(self):
        kt = graph_algebra_ktheory(vertex_matrix(bundled("squares_z2").graph))
        assert str(kt.K0) == "Z/3Z" and str(kt.K1) == "0"
        kt = graph_algebra_ktheory(vertex_matrix(bundled("penrose").graph))
        assert str(kt.K0) == "0" and str(kt.K1) == "0"


class TestPenroseGeometry:
    def test_all_ratios_inverse_golden(self, penrose_spec):
        for m in penrose_spec.edge_maps.values():
            assert m.c_upper == pytest.approx(1 / TAU, abs=1e-12)
            assert m.c_lower == pytest.approx(1 / TAU, abs=1e-12)

    def test_depth_12_prefix_residual(self, penrose_spec):
        spec = penrose_spec
        path12 = spec.graph.make_path(
            ["e1", "e2", "e3", "e5", "e4", "e1", "e2", "e3", "e4", "e2", "e1", "e1"])
        pt12 = coding_map_prefix(spec, path12)
        bound = spec.max_diameter * (1 / TAU) ** 12
        # extend by one more edge: the refinement stays within the certificate
        for eid in ("e1", "e2"):
            ext = spec.graph.make_path(path12.edges + (eid,))
            pt13 = coding_map_prefix(spec, ext)
            assert np.linalg.norm(pt12.array() - pt13.array()) <= bound

    def test_points_inside_triangle_component(self, penrose_spec):
        # every depth-12 path lands inside the seed box of its start vertex
        spec = penrose_spec
        for p in paths_from(spec.graph, "v1", 6)[::7]:
            pt = coding_map_prefix(spec, p)
            assert spec.seed_boxes[pt.vertex].contains(pt.array(), tol=1e-9)

    def test_residual_certificate(self, penrose_spec):
        approx = approx_for("penrose", 10)
        res = invariance_residual(penrose_spec, approx)
        bound = 2 * penrose_spec.max_diameter * (1 / TAU) ** 10
        assert max(res.values()) <= bound


class TestDustGeometry:
    def test_components_disjoint_at_depth_8(self, dust_spec):
        approx = approx_for("two_part_dust", 8)
        p1 = approx.cloud("v1").points
        p2 = approx.cloud("v2").points
        assert p1[:, 0].max() < p2[:, 0].min()

    def test_separation_with_positive_distance(self, dust_spec):
        approx = approx_for("two_part_dust", 9)
        from scipy.spatial import cKDTree
        gap = cKDTree(approx.cloud("v2").points).query(
            approx.cloud("v1").points)[0].min()
        assert gap > 0.9  # the two parts are far apart

    def test_residual_certificate(self, dust_spec):
        approx = approx_for("two_part_dust", 10)
        res = invariance_residual(dust_spec, approx)
        assert max(res.values()) <= 2 * approx.error_bound


class TestSquaresDataset:
    def test_attractor_fills_both_squares(self, squares_spec):
        approx = approx_for("squares_z2", 9)
        for v, x0 in (("v1", 0.0), ("v2", 2.0)):
            pts = approx.cloud(v).points
            grid = np.stack(np.meshgrid(np.linspace(x0, x0 + 1, 41),
                                        np.linspace(0, 1, 41)), axis=-1).reshape(-1, 2)
            assert hausdorff_distance(grid, pts) <= approx.error_bound + 0.025

    def test_branch_point_is_square_center(self, squares_spec):
        report = branch_points(squares_spec, approx_for("squares_z2", 9), 1e-6)
        assert [bp.x.coords for bp in report.branch_points] == [(0.5, 0.5)]
