#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mlgc/clustering.hpp"
#include "mlgc/errors.hpp"
#include "mlgc/graph.hpp"
#include "mlgc/metrics.hpp"
#include "mlgc/objective.hpp"
#include "mlgc/rng.hpp"

namespace mlgc {

struct GaussianComponent {
  Eigen::Vector2d mean;
  Eigen::Matrix2d covariance;
};

// Recipe for the synthetic benchmark: S point clouds over a shared vertex
// set, each drawn from a 2-D Gaussian mixture with K components, turned into
// K-NN graphs. Component parameters are either pinned per layer or sampled
// per seed (means uniform in [-10,10]^2, covariance scale*(A^T A + I/2) with
// A standard normal 2x2).
struct SyntheticConfig {
  int n_points = 50;
  int n_layers = 3;
  int n_components = 5;
  int knn = 20;
  std::uint64_t seed = 0;
  double covariance_scale = 1.0;
  std::vector<std::vector<GaussianComponent>> components;  // [layer][component]
};

struct Dataset {
  MultilayerGraph graph;
  ClusterLabels truth;
  std::vector<Eigen::MatrixXd> points;  // one N x 2 cloud per layer
};

// K-nearest-neighbor graph with edge weights 1/distance; the edge set is the
// union over both endpoints' selections and distance ties break toward the
// lower index. Coincident points get their weight capped at 1e12.
inline LayerGraph knn_graph(const Eigen::MatrixXd& points, int k) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k >= n) {
    throw ConfigError("knn_graph needs 1 <= k < N, got k = " +
                      std::to_string(k) + ", N = " + std::to_string(n));
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  int capped = 0;
  std::vector<std::pair<double, int>> order;
  order.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      order.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
    }
    std::sort(order.begin(), order.end());
    for (int m = 0; m < k; ++m) {
      const auto& [d2, j] = order[m];
      const double dist = std::sqrt(d2);
      double weight;
      if (dist < 1e-12) {
        weight = 1e12;
        ++capped;
      } else {
        weight = 1.0 / dist;
      }
      w(i, j) = weight;
      w(j, i) = weight;
    }
  }
  if (capped > 0) {
    std::fprintf(stderr,
                 "warning: knn_graph capped %d coincident-point weights at "
                 "1e12\n",
                 capped);
  }
  return LayerGraph::from_adjacency(std::move(w));
}

namespace detail {

inline std::vector<GaussianComponent> sample_components(
    int k, double scale, std::mt19937_64& rng) {
  std::vector<GaussianComponent> components(k);
  for (auto& c : components) {
    c.mean(0) = uniform_in(rng, -10.0, 10.0);
    c.mean(1) = uniform_in(rng, -10.0, 10.0);
    Eigen::Matrix2d a;
    a(0, 0) = normal_sample(rng);
    a(0, 1) = normal_sample(rng);
    a(1, 0) = normal_sample(rng);
    a(1, 1) = normal_sample(rng);
    c.covariance =
        scale * (a.transpose() * a + 0.5 * Eigen::Matrix2d::Identity());
  }
  return components;
}

}  // namespace detail

// Draws the multilayer dataset: one shared balanced ground-truth assignment,
// per-layer point clouds from that layer's mixture, and a K-NN graph per
// cloud. Deterministic for a fixed seed.
inline Dataset generate_synthetic(const SyntheticConfig& cfg) {
  const int n = cfg.n_points;
  const int k = cfg.n_components;
  const int s = cfg.n_layers;
  if (n < 2) throw ConfigError("synthetic dataset needs at least 2 points");
  if (k < 1 || k > n) {
    throw ConfigError("synthetic dataset needs 1 <= K <= N, got K = " +
                      std::to_string(k));
  }
  if (s < 1) throw ConfigError("synthetic dataset needs at least 1 layer");
  if (cfg.knn < 1 || cfg.knn >= n) {
    throw ConfigError("synthetic dataset needs 1 <= knn < N, got knn = " +
                      std::to_string(cfg.knn));
  }
  if (cfg.covariance_scale <= 0.0) {
    throw ConfigError("covariance scale must be positive");
  }
  if (!cfg.components.empty()) {
    if (static_cast<int>(cfg.components.size()) != s) {
      throw ConfigError("pinned components must list one set per layer");
    }
    for (const auto& layer : cfg.components) {
      if (static_cast<int>(layer.size()) != k) {
        throw ConfigError("pinned components must list K sets per layer");
      }
      for (const auto& c : layer) {
        Eigen::LLT<Eigen::Matrix2d> llt(c.covariance);
        if (llt.info() != Eigen::Success) {
          throw ConfigError("pinned covariance is not positive definite");
        }
      }
    }
  }

  // balanced component assignment, shared by every layer
  ClusterLabels truth;
  truth.ids.reserve(n);
  const int base = n / k;
  const int extra = n % k;
  for (int c = 0; c < k; ++c) {
    const int count = base + (c < extra ? 1 : 0);
    truth.ids.insert(truth.ids.end(), count, c);
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<LayerGraph> layers;
  std::vector<Eigen::MatrixXd> clouds;
  layers.reserve(s);
  clouds.reserve(s);
  for (int layer = 0; layer < s; ++layer) {
    const std::vector<GaussianComponent> components =
        cfg.components.empty()
            ? detail::sample_components(k, cfg.covariance_scale, rng)
            : cfg.components[layer];
    std::vector<Eigen::Matrix2d> chol(k);
    for (int c = 0; c < k; ++c) {
      chol[c] = Eigen::LLT<Eigen::Matrix2d>(components[c].covariance).matrixL();
    }
    Eigen::MatrixXd cloud(n, 2);
    for (int i = 0; i < n; ++i) {
      Eigen::Vector2d xi(normal_sample(rng), normal_sample(rng));
      cloud.row(i) =
          (components[truth.ids[i]].mean + chol[truth.ids[i]] * xi).transpose();
    }
    layers.push_back(knn_graph(cloud, cfg.knn));
    clouds.push_back(std::move(cloud));
  }
  return Dataset{MultilayerGraph(std::move(layers)), std::move(truth),
                 std::move(clouds)};
}

namespace detail {

// Shortest text form that reparses to the identical double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

inline std::ifstream open_for_reading(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

inline std::string layer_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "layer_%02d.edges", index);
  return buf;
}

[[noreturn]] inline void parse_fail(const std::filesystem::path& path,
                                    int line, const std::string& message) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " +
                   message);
}

}  // namespace detail

// Directory layout: meta.json with {n_vertices, n_layers}, one
// layer_XX.edges file per layer with "i j w" lines ('#' starts a comment),
// and an optional labels.txt with one integer per line.
inline void save_multilayer(const MultilayerGraph& g,
                            const std::optional<ClusterLabels>& truth,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    nlohmann::json meta;
    meta["n_vertices"] = g.n_vertices();
    meta["n_layers"] = g.n_layers();
    auto out = detail::open_for_writing(dir / "meta.json");
    out << meta.dump(2) << "\n";
  }
  for (int s = 0; s < g.n_layers(); ++s) {
    auto out = detail::open_for_writing(dir / detail::layer_file_name(s));
    out << "# i j w\n";
    const Eigen::MatrixXd& w = g.layer(s).adjacency();
    for (int i = 0; i < g.n_vertices(); ++i) {
      for (int j = i + 1; j < g.n_vertices(); ++j) {
        if (w(i, j) > 0.0) {
          out << i << " " << j << " " << detail::format_double(w(i, j))
              << "\n";
        }
      }
    }
  }
  if (truth.has_value()) {
    if (truth->size() != g.n_vertices()) {
      throw DimensionError("label count does not match vertex count");
    }
    auto out = detail::open_for_writing(dir / "labels.txt");
    for (int id : truth->ids) out << id << "\n";
  }
}

inline std::pair<MultilayerGraph, std::optional<ClusterLabels>>
load_multilayer(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  const std::filesystem::path meta_path = dir / "meta.json";
  if (!std::filesystem::exists(meta_path)) {
    throw ParseError(meta_path.string() + ":0: missing meta file");
  }
  int n_vertices = 0;
  int n_layers = 0;
  {
    auto in = detail::open_for_reading(meta_path);
    nlohmann::json meta;
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(meta_path.string() + ": " + e.what());
    }
    if (!meta.contains("n_vertices") ||
        !meta["n_vertices"].is_number_integer() ||
        !meta.contains("n_layers") || !meta["n_layers"].is_number_integer()) {
      throw ParseError(meta_path.string() +
                       ": meta needs integer n_vertices and n_layers");
    }
    n_vertices = meta["n_vertices"].get<int>();
    n_layers = meta["n_layers"].get<int>();
  }
  if (n_vertices < 1 || n_layers < 1) {
    throw ParseError(meta_path.string() + ": meta fields must be positive");
  }

  std::vector<std::filesystem::path> layer_files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("layer_") && name.ends_with(".edges")) {
      layer_files.push_back(entry.path());
    }
  }
  std::sort(layer_files.begin(), layer_files.end());
  if (static_cast<int>(layer_files.size()) != n_layers) {
    throw ParseError(meta_path.string() + ": meta declares " +
                     std::to_string(n_layers) + " layers but " +
                     std::to_string(layer_files.size()) +
                     " layer files are present");
  }

  std::vector<LayerGraph> layers;
  layers.reserve(n_layers);
  for (const auto& path : layer_files) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_vertices, n_vertices);
    auto in = detail::open_for_reading(path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      std::istringstream fields(line);
      long long i = 0, j = 0;
      double weight = 0.0;
      if (!(fields >> i >> j >> weight)) {
        detail::parse_fail(path, line_no, "expected 'i j w'");
      }
      std::string trailing;
      if (fields >> trailing) {
        detail::parse_fail(path, line_no, "trailing token '" + trailing + "'");
      }
      if (i < 0 || j < 0 || i >= n_vertices || j >= n_vertices) {
        detail::parse_fail(path, line_no,
                           "vertex id out of range for n_vertices = " +
                               std::to_string(n_vertices));
      }
      if (i == j) {
        detail::parse_fail(path, line_no, "self-loops are not allowed");
      }
      if (weight < 0.0) {
        detail::parse_fail(path, line_no, "negative weight");
      }
      // duplicate and asymmetric entries merge by maximum
      const double merged = std::max(w(i, j), weight);
      w(i, j) = merged;
      w(j, i) = merged;
    }
    layers.push_back(LayerGraph::from_adjacency(std::move(w)));
  }

  std::optional<ClusterLabels> truth;
  const std::filesystem::path labels_path = dir / "labels.txt";
  if (std::filesystem::exists(labels_path)) {
    auto in = detail::open_for_reading(labels_path);
    ClusterLabels labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream fields(line);
      int id = 0;
      if (!(fields >> id) || id < 0) {
        detail::parse_fail(labels_path, line_no,
                           "expected a nonnegative integer label");
      }
      labels.ids.push_back(id);
    }
    if (labels.size() != n_vertices) {
      throw ParseError(labels_path.string() + ": expected " +
                       std::to_string(n_vertices) + " labels, got " +
                       std::to_string(labels.size()));
    }
    truth = std::move(labels);
  }
  return {MultilayerGraph(std::move(layers)), std::move(truth)};
}

// Header line "N K", then N rows of K full-precision decimals.
inline void save_embedding(const Embedding& z,
                           const std::filesystem::path& path) {
  auto out = detail::open_for_writing(path);
  out << z.n_vertices() << " " << z.dim() << "\n";
  for (int i = 0; i < z.n_vertices(); ++i) {
    for (int j = 0; j < z.dim(); ++j) {
      if (j > 0) out << " ";
      out << detail::format_double(z.matrix(i, j));
    }
    out << "\n";
  }
}

inline Embedding load_embedding(const std::filesystem::path& path) {
  auto in = detail::open_for_reading(path);
  int n = 0, k = 0;
  if (!(in >> n >> k) || n < 1 || k < 1) {
    throw ParseError(path.string() + ":1: expected header 'N K'");
  }
  Eigen::MatrixXd m(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      if (!(in >> m(i, j))) {
        throw ParseError(path.string() + ": expected " +
                         std::to_string(n * k) + " embedding entries");
      }
    }
  }
  return Embedding{std::move(m)};
}

inline void save_labels(const ClusterLabels& labels,
                        const std::filesystem::path& path) {
  auto out = detail::open_for_writing(path);
  for (int id : labels.ids) out << id << "\n";
}

inline ClusterLabels load_labels(const std::filesystem::path& path) {
  auto in = detail::open_for_reading(path);
  ClusterLabels labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream fields(line);
    int id = 0;
    std::string trailing;
    if (!(fields >> id) || id < 0 || (fields >> trailing)) {
      detail::parse_fail(path, line_no,
                         "expected a nonnegative integer label");
    }
    labels.ids.push_back(id);
  }
  if (labels.ids.empty()) {
    throw ParseError(path.string() + ": no labels found");
  }
  return labels;
}

inline void save_scores(const Scores& s, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["accuracy"] = s.accuracy;
  doc["purity"] = s.purity;
  doc["nmi"] = s.nmi;
  doc["ari"] = s.ari;
  auto out = detail::open_for_writing(path);
  out << doc.dump(2) << "\n";
}

inline Scores load_scores(const std::filesystem::path& path) {
  auto in = detail::open_for_reading(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  Scores s;
  try {
    s.accuracy = doc.at("accuracy").get<double>();
    s.purity = doc.at("purity").get<double>();
    s.nmi = doc.at("nmi").get<double>();
    s.ari = doc.at("ari").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return s;
}

}  // namespace mlgc
