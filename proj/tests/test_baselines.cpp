#include <doctest.h>

#include <mlgc/baselines.hpp>
#include <mlgc/experiment.hpp>

#include "test_util.hpp"

using namespace mlgc;

TEST_CASE("arithmetic mean laplacian") {
  SUBCASE("single layer is a no-op") {
    const MultilayerGraph g(
        std::vector<LayerGraph>{testutil::unit_triangle()});
    CHECK(arithmetic_mean_laplacian(g).entries.isApprox(
        build_laplacian(testutil::unit_triangle()).entries));
  }
  SUBCASE("identical layers average to themselves") {
    const MultilayerGraph g(std::vector<LayerGraph>{
        testutil::unit_path3(), testutil::unit_path3()});
    CHECK(arithmetic_mean_laplacian(g).entries.isApprox(
        build_laplacian(testutil::unit_path3()).entries));
  }
  SUBCASE("disjoint edges average entrywise") {
    const MultilayerGraph g(std::vector<LayerGraph>{
        LayerGraph::from_edges(3, {{0, 1, 1.0}}),
        LayerGraph::from_edges(3, {{1, 2, 1.0}})});
    const LaplacianMatrix expected = build_laplacian(
        LayerGraph::from_edges(3, {{0, 1, 0.5}, {1, 2, 0.5}}));
    CHECK(arithmetic_mean_laplacian(g).entries.isApprox(expected.entries));
  }
  SUBCASE("mean of valid laplacians is a valid laplacian") {
    std::mt19937_64 rng(19);
    const MultilayerGraph g = random_multilayer(9, 3, rng);
    CHECK(validate_laplacian(arithmetic_mean_laplacian(g).entries));
  }
  SUBCASE("swapping two layers leaves the mean bitwise unchanged") {
    std::mt19937_64 rng(23);
    const LayerGraph a = random_connected_layer(6, rng);
    const LayerGraph b = random_connected_layer(6, rng);
    const MultilayerGraph ab(std::vector<LayerGraph>{a, b});
    const MultilayerGraph ba(std::vector<LayerGraph>{b, a});
    CHECK(arithmetic_mean_laplacian(ab).entries ==
          arithmetic_mean_laplacian(ba).entries);
  }
  SUBCASE("permuting dyadic-weight layers is exact in any order") {
    const LayerGraph l1 = LayerGraph::from_edges(4, {{0, 1, 0.5}});
    const LayerGraph l2 = LayerGraph::from_edges(4, {{1, 2, 0.25}});
    const LayerGraph l3 = LayerGraph::from_edges(4, {{2, 3, 1.0}});
    const MultilayerGraph g123(std::vector<LayerGraph>{l1, l2, l3});
    const MultilayerGraph g312(std::vector<LayerGraph>{l3, l1, l2});
    CHECK(arithmetic_mean_laplacian(g123).entries ==
          arithmetic_mean_laplacian(g312).entries);
  }
}

TEST_CASE("baseline clustering") {
  SUBCASE("identical two-component layers recover the components") {
    const LayerGraph layer = LayerGraph::from_edges(
        4, {{0, 1, 1.0}, {2, 3, 1.0}});
    const MultilayerGraph g(std::vector<LayerGraph>{layer, layer, layer});
    KMeansConfig cfg;
    cfg.seed = 4;
    const ClusterLabels labels =
        baseline_cluster(g, 2, BaselineMethod::ArithmeticMean, cfg);
    CHECK(labels.ids[0] == labels.ids[1]);
    CHECK(labels.ids[2] == labels.ids[3]);
    CHECK(labels.ids[0] != labels.ids[2]);
  }
  SUBCASE("one layer reduces to plain spectral clustering") {
    const MultilayerGraph g(
        std::vector<LayerGraph>{testutil::unit_triangle()});
    KMeansConfig cfg;
    cfg.seed = 8;
    const ClusterLabels via_baseline =
        baseline_cluster(g, 1, BaselineMethod::ArithmeticMean, cfg);
    const ClusterLabels direct = spectral_clustering(
        build_laplacian(testutil::unit_triangle()), 1, cfg);
    CHECK(via_baseline.ids == direct.ids);
  }
}
