#pragma once

// Shared containers: the indexed sample, kernels, evaluation grids and graphs.

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tvnpn {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense matrix that callers promise is symmetric (correlation-type objects).
using SymMatrix = Eigen::MatrixXd;

bool is_symmetric(const Matrix& m, double tol = 1e-12);

/// n observations of (x, z): x is n x d, z holds the index values in (0,1).
class Dataset {
 public:
  Dataset(Matrix x, Vector z);

  Index n() const noexcept { return x_.rows(); }
  Index d() const noexcept { return x_.cols(); }
  const Matrix& x() const noexcept { return x_; }
  const Vector& z() const noexcept { return z_; }

 private:
  Matrix x_;
  Vector z_;
};

enum class KernelName { epanechnikov, uniform, triangular };

std::string_view to_string(KernelName name) noexcept;
std::optional<KernelName> parse_kernel(std::string_view name) noexcept;
std::span<const KernelName> all_kernels() noexcept;

/// K(u) for a kernel supported on [-1, 1].
double kernel_eval(KernelName name, double u) noexcept;

struct KernelSpec {
  KernelSpec(KernelName name, double bandwidth);

  KernelName name;
  double bandwidth;

  double eval(double u) const noexcept { return kernel_eval(name, u); }
  /// K_h(t) = K(t / h) / h
  double weight(double t) const noexcept {
    return kernel_eval(name, t / bandwidth) / bandwidth;
  }
};

inline double kernel_eval(const KernelSpec& spec, double u) noexcept {
  return spec.eval(u);
}

/// Ordered index values at which estimates or test statistics are evaluated.
class EvalGrid {
 public:
  /// m points evenly spaced over [lo, hi], endpoints included.
  static EvalGrid evenly(double lo, double hi, std::size_t m);
  static EvalGrid singleton(double z);
  /// m points evenly spaced strictly inside (0,1): i / (m + 1), i = 1..m.
  static EvalGrid interior(std::size_t m);

  double lo() const noexcept { return points_.front(); }
  double hi() const noexcept { return points_.back(); }
  std::span<const double> points() const& noexcept { return points_; }
  std::span<const double> points() && = delete;
  std::size_t size() const noexcept { return points_.size(); }

 private:
  explicit EvalGrid(std::vector<double> points);
  std::vector<double> points_;
};

/// Unordered vertex pair, stored with j < k (0-based).
struct Edge {
  Index j;
  Index k;

  auto operator<=>(const Edge&) const = default;
};

Edge make_edge(Index a, Index b);

class Graph {
 public:
  explicit Graph(Index d);

  Index d() const noexcept { return d_; }
  std::size_t size() const noexcept { return edges_.size(); }
  const std::set<Edge>& edges() const& noexcept { return edges_; }
  std::set<Edge> edges() && { return std::move(edges_); }

  void add_edge(Index a, Index b);
  bool remove_edge(Index a, Index b);
  bool has_edge(Index a, Index b) const;

  /// Pairs (j < k) that are not edges of this graph.
  std::vector<Edge> complement_edges() const;

  static Graph complete(Index d);
  /// Off-diagonal support of a matrix; an entry counts if either (j,k) or
  /// (k,j) exceeds tol in magnitude.
  static Graph from_support(const Matrix& m, double tol = 0.0);

  bool operator==(const Graph&) const = default;

 private:
  Index d_;
  std::set<Edge> edges_;
};

Dataset read_dataset_csv(std::istream& in);
void write_dataset_csv(std::ostream& out, const Dataset& data);

Dataset load_dataset(const std::filesystem::path& path);
/// Comment lines (prefixed with "# ") are written before the header and
/// ignored by load_dataset.
void save_dataset(const std::filesystem::path& path, const Dataset& data,
                  std::span<const std::string> comments = {});

/// {"d": int, "edges": [[j,k], ...]}, vertices 1-indexed on disk.
Graph load_graph_json(const std::filesystem::path& path);
void save_graph_json(const std::filesystem::path& path, const Graph& g);
std::string graph_to_json_string(const Graph& g);
Graph graph_from_json_string(std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace tvnpn
