#include "tvnpn/datamodel.hpp"

#include "tvnpn/error.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tvnpn {

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.rows(); ++j)
    for (Index k = j + 1; k < m.cols(); ++k)
      if (!(std::abs(m(j, k) - m(k, j)) <= tol)) return false;
  return true;
}

Dataset::Dataset(Matrix x, Vector z) : x_(std::move(x)), z_(std::move(z)) {
  if (x_.rows() != z_.size())
    throw Error(ErrorCode::dimension, "dataset: x has " + std::to_string(x_.rows()) +
                                          " rows but z has " + std::to_string(z_.size()));
  if (x_.rows() < 2) throw Error(ErrorCode::dimension, "dataset: need n >= 2 samples");
  if (x_.cols() < 2) throw Error(ErrorCode::dimension, "dataset: need d >= 2 variables");
  if (!x_.allFinite() || !z_.allFinite())
    throw Error(ErrorCode::domain, "dataset: non-finite entry");
  for (Index i = 0; i < z_.size(); ++i) {
    if (!(z_[i] > 0.0 && z_[i] < 1.0))
      throw Error(ErrorCode::domain, "dataset: z[" + std::to_string(i) +
                                         "] = " + format_double(z_[i]) +
                                         " is outside (0,1)");
  }
}

namespace {

constexpr std::array<KernelName, 3> kKernels = {
    KernelName::epanechnikov, KernelName::uniform, KernelName::triangular};

}  // namespace

std::string_view to_string(KernelName name) noexcept {
  switch (name) {
    case KernelName::epanechnikov: return "epanechnikov";
    case KernelName::uniform: return "uniform";
    case KernelName::triangular: return "triangular";
  }
  return "unknown";
}

std::optional<KernelName> parse_kernel(std::string_view name) noexcept {
  for (KernelName k : kKernels)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::span<const KernelName> all_kernels() noexcept { return kKernels; }

double kernel_eval(KernelName name, double u) noexcept {
  const double a = std::abs(u);
  switch (name) {
    case KernelName::epanechnikov: return a < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelName::uniform: return a <= 1.0 ? 0.5 : 0.0;
    case KernelName::triangular: return a < 1.0 ? 1.0 - a : 0.0;
  }
  return 0.0;
}

KernelSpec::KernelSpec(KernelName name_, double bandwidth_)
    : name(name_), bandwidth(bandwidth_) {
  if (!(bandwidth > 0.0 && bandwidth < 1.0))
    throw Error(ErrorCode::invalid_argument,
                "kernel bandwidth must lie in (0,1), got " + format_double(bandwidth));
}

EvalGrid::EvalGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::invalid_argument, "grid: no points");
  for (double p : points_)
    if (!(p > 0.0 && p < 1.0))
      throw Error(ErrorCode::domain, "grid: point " + format_double(p) + " outside (0,1)");
}

EvalGrid EvalGrid::evenly(double lo, double hi, std::size_t m) {
  if (!(lo > 0.0 && lo <= hi && hi < 1.0))
    throw Error(ErrorCode::domain, "grid: need 0 < lo <= hi < 1");
  if (m == 0) throw Error(ErrorCode::invalid_argument, "grid: need at least one point");
  if (m == 1 || lo == hi) {
    if (lo != hi)
      throw Error(ErrorCode::invalid_argument, "grid: a single point needs lo == hi");
    return EvalGrid(std::vector<double>(1, lo));
  }
  std::vector<double> pts(m);
  const double step = (hi - lo) / static_cast<double>(m - 1);
  for (std::size_t i = 0; i < m; ++i) pts[i] = lo + step * static_cast<double>(i);
  pts.back() = hi;
  return EvalGrid(std::move(pts));
}

EvalGrid EvalGrid::singleton(double z) { return EvalGrid(std::vector<double>(1, z)); }

EvalGrid EvalGrid::interior(std::size_t m) {
  if (m == 0) throw Error(ErrorCode::invalid_argument, "grid: need at least one point");
  std::vector<double> pts(m);
  for (std::size_t i = 0; i < m; ++i)
    pts[i] = static_cast<double>(i + 1) / static_cast<double>(m + 1);
  return EvalGrid(std::move(pts));
}

Edge make_edge(Index a, Index b) {
  if (a == b) throw Error(ErrorCode::invalid_argument, "graph: self-loops are not allowed");
  return a < b ? Edge{a, b} : Edge{b, a};
}

Graph::Graph(Index d) : d_(d) {
  if (d < 1) throw Error(ErrorCode::invalid_argument, "graph: need d >= 1");
}

void Graph::add_edge(Index a, Index b) {
  if (a < 0 || b < 0 || a >= d_ || b >= d_)
    throw Error(ErrorCode::invalid_argument, "graph: vertex out of range");
  edges_.insert(make_edge(a, b));
}

bool Graph::remove_edge(Index a, Index b) { return edges_.erase(make_edge(a, b)) > 0; }

bool Graph::has_edge(Index a, Index b) const {
  if (a == b) return false;
  return edges_.contains(make_edge(a, b));
}

std::vector<Edge> Graph::complement_edges() const {
  std::vector<Edge> out;
  for (Index j = 0; j < d_; ++j)
    for (Index k = j + 1; k < d_; ++k)
      if (!edges_.contains(Edge{j, k})) out.push_back(Edge{j, k});
  return out;
}

Graph Graph::complete(Index d) {
  Graph g(d);
  for (Index j = 0; j < d; ++j)
    for (Index k = j + 1; k < d; ++k) g.edges_.insert(Edge{j, k});
  return g;
}

Graph Graph::from_support(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::dimension, "graph: matrix not square");
  Graph g(m.rows());
  for (Index j = 0; j < m.rows(); ++j)
    for (Index k = j + 1; k < m.cols(); ++k)
      if (std::abs(m(j, k)) > tol || std::abs(m(k, j)) > tol) g.edges_.insert(Edge{j, k});
  return g;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf.data(), ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw Error(ErrorCode::parse, "csv line " + std::to_string(line_no) +
                                      ": cannot parse finite number from '" +
                                      std::string(cell) + "'");
  return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    header_line = std::string(t);
    break;
  }
  if (header_line.empty()) throw Error(ErrorCode::parse, "csv: missing header row");
  header = split_commas(header_line);
  if (header.size() < 3 || header.front() != "z")
    throw Error(ErrorCode::parse, "csv: header must be z,x1,...,xd with d >= 2");
  const std::size_t d = header.size() - 1;

  std::vector<double> zs;
  std::vector<double> xs;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split_commas(t);
    if (cells.size() != d + 1)
      throw Error(ErrorCode::dimension, "csv line " + std::to_string(line_no) + ": expected " +
                                            std::to_string(d + 1) + " fields, found " +
                                            std::to_string(cells.size()));
    zs.push_back(parse_cell(cells[0], line_no));
    for (std::size_t c = 1; c <= d; ++c) xs.push_back(parse_cell(cells[c], line_no));
  }
  const auto n = static_cast<Index>(zs.size());
  Matrix x(n, static_cast<Index>(d));
  Vector z(n);
  for (Index i = 0; i < n; ++i) {
    z[i] = zs[static_cast<std::size_t>(i)];
    for (Index c = 0; c < static_cast<Index>(d); ++c)
      x(i, c) = xs[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(c)];
  }
  return Dataset(std::move(x), std::move(z));
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << 'z';
  for (Index c = 0; c < data.d(); ++c) out << ",x" << (c + 1);
  out << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    out << format_double(data.z()[i]);
    for (Index c = 0; c < data.d(); ++c) out << ',' << format_double(data.x()(i, c));
    out << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_dataset_csv(in);
}

void save_dataset(const std::filesystem::path& path, const Dataset& data,
                  std::span<const std::string> comments) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  for (const auto& c : comments) out << "# " << c << '\n';
  write_dataset_csv(out, data);
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::string graph_to_json_string(const Graph& g) {
  nlohmann::json j;
  j["d"] = g.d();
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.j + 1, e.k + 1});
  j["edges"] = std::move(edges);
  return j.dump();
}

Graph graph_from_json_string(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const auto d = j.at("d").get<Index>();
    Graph g(d);
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw Error(ErrorCode::parse, "graph json: each edge must be [j,k]");
      const auto a = e[0].get<Index>();
      const auto b = e[1].get<Index>();
      if (a < 1 || b < 1 || a > d || b > d)
        throw Error(ErrorCode::parse, "graph json: vertex out of range 1..d");
      g.add_edge(a - 1, b - 1);
    }
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::parse, std::string("graph json: ") + ex.what());
  }
}

Graph load_graph_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json_string(ss.str());
}

void save_graph_json(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << graph_to_json_string(g) << '\n';
}

}  // namespace tvnpn
