#include "tvnpn/kendall.hpp"

#include "tvnpn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace tvnpn {

namespace {

inline double sign(double v) noexcept { return static_cast<double>((v > 0.0) - (v < 0.0)); }

}  // namespace

double PairSummary::w_row_of(Index sample) const {
  for (Index r = 0; r < window_size(); ++r)
    if (window[static_cast<std::size_t>(r)] == sample) return w_row[r];
  return 0.0;
}

double PairSummary::s_row_of(Index sample, Index j, Index k) const {
  for (Index r = 0; r < window_size(); ++r)
    if (window[static_cast<std::size_t>(r)] == sample) return s_row(r, packed_index(j, k, d));
  return 0.0;
}

ZOrder::ZOrder(const Dataset& data) : order_(static_cast<std::size_t>(data.n())) {
  std::iota(order_.begin(), order_.end(), Index{0});
  const auto& z = data.z();
  std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) { return z[a] < z[b]; });
  sorted_z_.reserve(order_.size());
  for (Index i : order_) sorted_z_.push_back(z[i]);
}

std::vector<Index> ZOrder::candidates(double z0, double h) const {
  const auto lo = std::lower_bound(sorted_z_.begin(), sorted_z_.end(), z0 - h);
  const auto hi = std::upper_bound(sorted_z_.begin(), sorted_z_.end(), z0 + h);
  const auto first = static_cast<std::size_t>(lo - sorted_z_.begin());
  const auto last = static_cast<std::size_t>(hi - sorted_z_.begin());
  return {order_.begin() + static_cast<std::ptrdiff_t>(first),
          order_.begin() + static_cast<std::ptrdiff_t>(last)};
}

PairSummary pair_summary(const Dataset& data, const KernelSpec& spec, double z0) {
  return pair_summary(data, spec, z0, ZOrder(data));
}

PairSummary pair_summary(const Dataset& data, const KernelSpec& spec, double z0,
                         const ZOrder& order) {
  const Index d = data.d();
  const auto& x = data.x();
  const auto& z = data.z();

  PairSummary out;
  out.z0 = z0;
  out.h = spec.bandwidth;
  out.n = data.n();
  out.d = d;

  std::vector<double> kw;
  for (Index i : order.candidates(z0, spec.bandwidth)) {
    const double w = spec.weight(z[i] - z0);
    if (w > 0.0) {
      out.window.push_back(i);
      kw.push_back(w);
    }
  }
  const Index m = out.window_size();
  if (m < 2)
    throw Error(ErrorCode::degenerate_window,
                "kendall: fewer than 2 samples within bandwidth " + format_double(spec.bandwidth) +
                    " of z0 = " + format_double(z0));

  const Index p = packed_size(d);
  out.w_row = Vector::Zero(m);
  out.s_row = RowMatrix::Zero(m, p);

  // Gather window rows so the pair loop walks contiguous memory.
  RowMatrix xw(m, d);
  for (Index r = 0; r < m; ++r) xw.row(r) = x.row(out.window[static_cast<std::size_t>(r)]);

  std::vector<double> sg(static_cast<std::size_t>(d));
  for (Index a = 0; a < m; ++a) {
    const double ka = kw[static_cast<std::size_t>(a)];
    double* sa = out.s_row.row(a).data();
    for (Index b = a + 1; b < m; ++b) {
      const double omega = ka * kw[static_cast<std::size_t>(b)];
      out.w_row[a] += omega;
      out.w_row[b] += omega;
      for (Index j = 0; j < d; ++j) sg[static_cast<std::size_t>(j)] = sign(xw(a, j) - xw(b, j));
      double* sb = out.s_row.row(b).data();
      Index idx = 0;
      for (Index j = 0; j < d; ++j) {
        const double wj = omega * sg[static_cast<std::size_t>(j)];
        for (Index k = j; k < d; ++k, ++idx) {
          const double v = wj * sg[static_cast<std::size_t>(k)];
          sa[idx] += v;
          sb[idx] += v;
        }
      }
    }
  }

  // Totals are accumulated row by row in window order; the bootstrap relies on
  // the same order to reproduce them exactly.
  out.w_total = 0.0;
  for (Index r = 0; r < m; ++r) out.w_total += out.w_row[r];
  Vector packed = Vector::Zero(p);
  for (Index r = 0; r < m; ++r)
    for (Index q = 0; q < p; ++q) packed[q] += out.s_row(r, q);
  out.s_total.resize(d, d);
  for (Index j = 0, idx = 0; j < d; ++j)
    for (Index k = j; k < d; ++k, ++idx) out.s_total(j, k) = out.s_total(k, j) = packed[idx];
  return out;
}

TauEstimate kendall_tau(const PairSummary& summary) {
  if (!(summary.w_total > 0.0))
    throw Error(ErrorCode::zero_weight, "kendall: total pair weight is zero");
  TauEstimate out;
  out.z0 = summary.z0;
  out.h = summary.h;
  const Index d = summary.d;
  out.tau.resize(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index k = j; k < d; ++k) {
      double t = summary.s_total(j, k) / summary.w_total;
      // Rounding can push a perfect concordance a hair past +-1.
      if (std::abs(t) > 1.0 && std::abs(t) <= 1.0 + 1e-12) t = std::copysign(1.0, t);
      out.tau(j, k) = out.tau(k, j) = t;
    }
  }
  const auto n = static_cast<double>(summary.n);
  out.un_omega = summary.w_total / (n * (n - 1.0));
  return out;
}

SymMatrix latent_correlation(const SymMatrix& tau) {
  SymMatrix sigma = (tau.array() * (std::numbers::pi / 2.0)).sin().matrix();
  sigma.diagonal().setOnes();
  return sigma;
}

SymMatrix latent_correlation(const TauEstimate& tau) { return latent_correlation(tau.tau); }

std::vector<PathPoint> correlation_path(const Dataset& data, const KernelSpec& spec,
                                        const EvalGrid& grid) {
  const ZOrder order(data);
  std::vector<PathPoint> out;
  out.reserve(grid.size());
  for (double z : grid.points()) {
    PathPoint pt;
    pt.z = z;
    try {
      const auto tau = kendall_tau(pair_summary(data, spec, z, order));
      pt.sigma = latent_correlation(tau);
      pt.un_omega = tau.un_omega;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate_window && e.code() != ErrorCode::zero_weight) throw;
      pt.error = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace tvnpn
