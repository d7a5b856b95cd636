#include "tvnpn/baselines.hpp"

#include "tvnpn/error.hpp"

#include <algorithm>
#include <cmath>

namespace tvnpn {

SymMatrix kernel_pearson(const Dataset& data, const KernelSpec& spec, double z0) {
  const Index d = data.d();
  SymMatrix acc = SymMatrix::Zero(d, d);
  double total = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    const double w = spec.weight(data.z()[i] - z0);
    if (w <= 0.0) continue;
    const Vector xi = data.x().row(i).transpose();
    acc.noalias() += w * xi * xi.transpose();
    total += w;
  }
  if (!(total > 0.0))
    throw Error(ErrorCode::zero_weight,
                "pearson: no sample within bandwidth of z0 = " + format_double(z0));
  acc /= total;
  return 0.5 * (acc + acc.transpose());
}

void LassoConfig::validate() const {
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lasso: lambda must be positive");
  if (max_iter < 1) throw Error(ErrorCode::invalid_argument, "lasso: max_iter must be positive");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "lasso: tol must be positive");
}

namespace {

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

}  // namespace

LassoFit kernel_neighborhood_fit(const Dataset& data, const KernelSpec& spec, double z0, Index j,
                                 const LassoConfig& cfg) {
  cfg.validate();
  const Index d = data.d();
  if (j < 0 || j >= d) throw Error(ErrorCode::invalid_argument, "lasso: column out of range");

  const double nh = static_cast<double>(data.n()) * spec.bandwidth;
  std::vector<Index> rows;
  std::vector<double> w;
  for (Index i = 0; i < data.n(); ++i) {
    const double k = spec.eval((data.z()[i] - z0) / spec.bandwidth);
    if (k > 0.0) {
      rows.push_back(i);
      w.push_back(k / nh);
    }
  }
  if (rows.size() < 2)
    throw Error(ErrorCode::degenerate_window,
                "lasso: fewer than 2 samples within bandwidth of z0 = " + format_double(z0));

  const auto m = static_cast<Index>(rows.size());
  const Index p = d - 1;
  Matrix x(m, p);
  Vector y(m);
  for (Index r = 0; r < m; ++r) {
    const Index i = rows[static_cast<std::size_t>(r)];
    y[r] = data.x()(i, j);
    for (Index c = 0, col = 0; c < d; ++c)
      if (c != j) x(r, col++) = data.x()(i, c);
  }
  const Eigen::Map<const Vector> wv(w.data(), m);
  Vector curv(p);  // 2 sum w x_k^2
  for (Index k = 0; k < p; ++k) curv[k] = 2.0 * wv.dot(x.col(k).cwiseAbs2());

  LassoFit fit;
  fit.beta = Vector::Zero(p);
  Vector resid = y;
  auto objective = [&] {
    return wv.dot(resid.cwiseAbs2()) + cfg.lambda * fit.beta.lpNorm<1>();
  };
  auto kkt = [&] {
    double gap = 0.0;
    for (Index k = 0; k < p; ++k) {
      const double grad = -2.0 * wv.dot(x.col(k).cwiseProduct(resid));
      const double b = fit.beta[k];
      const double v = b != 0.0 ? std::abs(grad + std::copysign(cfg.lambda, b))
                                : std::max(0.0, std::abs(grad) - cfg.lambda);
      gap = std::max(gap, v);
    }
    return gap;
  };

  fit.kkt_gap = kkt();
  while (fit.kkt_gap > cfg.tol) {
    if (fit.sweeps >= cfg.max_iter)
      throw Error(ErrorCode::non_convergence,
                  "lasso: column " + std::to_string(j + 1) + " stopped after " +
                      std::to_string(cfg.max_iter) + " sweeps with KKT gap " +
                      format_double(fit.kkt_gap));
    for (Index k = 0; k < p; ++k) {
      if (curv[k] <= 0.0) continue;
      const double old = fit.beta[k];
      const double rho = 2.0 * wv.dot(x.col(k).cwiseProduct(resid)) + curv[k] * old;
      const double nb = soft(rho, cfg.lambda) / curv[k];
      if (nb != old) {
        resid -= (nb - old) * x.col(k);
        fit.beta[k] = nb;
      }
    }
    ++fit.sweeps;
    fit.objective_trace.push_back(objective());
    fit.kkt_gap = kkt();
  }
  return fit;
}

Vector kernel_neighborhood_column(const Dataset& data, const KernelSpec& spec, double z0, Index j,
                                  const LassoConfig& cfg) {
  return kernel_neighborhood_fit(data, spec, z0, j, cfg).beta;
}

Graph neighborhood_graph(const Dataset& data, const KernelSpec& spec, double z0,
                         const LassoConfig& cfg) {
  const Index d = data.d();
  Graph g(d);
  for (Index j = 0; j < d; ++j) {
    const Vector beta = kernel_neighborhood_column(data, spec, z0, j, cfg);
    for (Index c = 0, col = 0; c < d; ++c) {
      if (c == j) continue;
      if (beta[col++] != 0.0) g.add_edge(j, c);
    }
  }
  return g;
}

}  // namespace tvnpn
