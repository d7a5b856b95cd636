#include "tvnpn/clime.hpp"

#include "tvnpn/error.hpp"

#include <cmath>
#include <string>

namespace tvnpn {

std::string_view to_string(ClimeMethod m) noexcept {
  return m == ClimeMethod::clime ? "clime" : "calibrated-clime";
}

std::optional<ClimeMethod> parse_clime_method(std::string_view s) noexcept {
  if (s == "clime") return ClimeMethod::clime;
  if (s == "calibrated-clime") return ClimeMethod::calibrated_clime;
  return std::nullopt;
}

std::string_view to_string(Symmetrize s) noexcept {
  return s == Symmetrize::none ? "none" : "min-magnitude";
}

void ClimeConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(ErrorCode::invalid_argument, "clime: lambda must be positive");
  if (method == ClimeMethod::calibrated_clime && !(gamma > 0.0 && gamma < 1.0))
    throw Error(ErrorCode::invalid_argument, "clime: gamma must lie in (0,1)");
  if (!(feasibility_tol > 0.0))
    throw Error(ErrorCode::invalid_argument, "clime: feasibility_tol must be positive");
}

namespace {

void check_inputs(const SymMatrix& sigma, Index j, double lambda) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
    throw Error(ErrorCode::dimension, "clime: sigma must be square");
  if (j < 0 || j >= sigma.rows()) throw Error(ErrorCode::invalid_argument, "clime: column out of range");
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "clime: lambda must be positive");
}

void raise_status(const LpResult& r, Index j) {
  const auto code = r.status == LpStatus::infeasible        ? ErrorCode::infeasible
                    : r.status == LpStatus::iteration_limit ? ErrorCode::iteration_limit
                                                            : ErrorCode::unbounded;
  throw Error(code, "clime: column " + std::to_string(j + 1) + " LP " +
                        std::string(to_string(r.status)));
}

}  // namespace

ColumnSolution clime_column(const SymMatrix& sigma, Index j, double lambda, double feasibility_tol) {
  check_inputs(sigma, j, lambda);
  const Index d = sigma.rows();

  //  S b+ - S b- <= lambda + e_j
  // -S b+ + S b- <= lambda - e_j
  Matrix a(2 * d, 2 * d);
  a.topLeftCorner(d, d) = sigma;
  a.topRightCorner(d, d) = -sigma;
  a.bottomLeftCorner(d, d) = -sigma;
  a.bottomRightCorner(d, d) = sigma;
  Vector b = Vector::Constant(2 * d, lambda);
  b[j] += 1.0;
  b[d + j] -= 1.0;
  const Vector c = Vector::Ones(2 * d);
  const std::vector<RowSense> sense(static_cast<std::size_t>(2 * d), RowSense::less_equal);

  const auto r = lp_solve(c, a, b, sense);
  if (r.status != LpStatus::optimal) raise_status(r, j);

  ColumnSolution out;
  out.beta = r.x.head(d) - r.x.tail(d);
  out.objective = out.beta.lpNorm<1>();
  out.iterations = r.iterations;
  Vector resid = sigma * out.beta;
  resid[j] -= 1.0;
  out.residual = resid.lpNorm<Eigen::Infinity>();
  if (out.residual > lambda + feasibility_tol)
    throw Error(ErrorCode::infeasible, "clime: column " + std::to_string(j + 1) +
                                           " residual " + format_double(out.residual) +
                                           " exceeds lambda");
  return out;
}

ColumnSolution calibrated_clime_column(const SymMatrix& sigma, Index j, double lambda, double gamma,
                                       double feasibility_tol) {
  check_inputs(sigma, j, lambda);
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error(ErrorCode::invalid_argument, "clime: gamma must lie in (0,1)");
  const Index d = sigma.rows();

  // Variables [b+ (d) | b- (d) | kappa].
  //  S b+ - S b- - lambda kappa <=  e_j
  // -S b+ + S b- - lambda kappa <= -e_j
  //    1'b+ + 1'b-      - kappa <=  0
  Matrix a = Matrix::Zero(2 * d + 1, 2 * d + 1);
  a.topLeftCorner(d, d) = sigma;
  a.block(0, d, d, d) = -sigma;
  a.block(d, 0, d, d) = -sigma;
  a.block(d, d, d, d) = sigma;
  a.col(2 * d).head(2 * d).setConstant(-lambda);
  a.row(2 * d).head(2 * d).setOnes();
  a(2 * d, 2 * d) = -1.0;
  Vector b = Vector::Zero(2 * d + 1);
  b[j] = 1.0;
  b[d + j] = -1.0;
  Vector c = Vector::Ones(2 * d + 1);
  c[2 * d] = gamma;
  const std::vector<RowSense> sense(static_cast<std::size_t>(2 * d + 1), RowSense::less_equal);

  const auto r = lp_solve(c, a, b, sense);
  if (r.status != LpStatus::optimal) raise_status(r, j);

  ColumnSolution out;
  out.beta = r.x.head(d) - r.x.segment(d, d);
  out.kappa = r.x[2 * d];
  out.objective = out.beta.lpNorm<1>() + gamma * out.kappa;
  out.iterations = r.iterations;
  Vector resid = sigma * out.beta;
  resid[j] -= 1.0;
  out.residual = resid.lpNorm<Eigen::Infinity>();
  if (out.residual > lambda * out.kappa + feasibility_tol ||
      out.beta.lpNorm<1>() > out.kappa + feasibility_tol)
    throw Error(ErrorCode::infeasible, "calibrated clime: column " + std::to_string(j + 1) +
                                           " violates its constraints");
  return out;
}

Matrix symmetrize_min_magnitude(const Matrix& omega) {
  Matrix out = omega;
  for (Index j = 0; j < omega.rows(); ++j) {
    for (Index k = j + 1; k < omega.cols(); ++k) {
      const double a = omega(j, k);
      const double b = omega(k, j);
      const double keep = std::abs(a) <= std::abs(b) ? a : b;
      out(j, k) = out(k, j) = keep;
    }
  }
  return out;
}

InverseEstimate inverse_correlation(const SymMatrix& sigma, const ClimeConfig& config, double z0) {
  config.validate();
  if (sigma.rows() != sigma.cols()) throw Error(ErrorCode::dimension, "clime: sigma must be square");
  const Index d = sigma.rows();

  InverseEstimate est;
  est.z0 = z0;
  est.config = config;
  est.omega_raw = Matrix::Zero(d, d);
  est.kappa = Vector::Zero(d);
  est.objective = Vector::Zero(d);

  std::string failures;
  ErrorCode first_code = ErrorCode::infeasible;
  for (Index j = 0; j < d; ++j) {
    try {
      const auto col =
          config.method == ClimeMethod::clime
              ? clime_column(sigma, j, config.lambda, config.feasibility_tol)
              : calibrated_clime_column(sigma, j, config.lambda, config.gamma,
                                        config.feasibility_tol);
      est.omega_raw.col(j) = col.beta;
      est.kappa[j] = col.kappa;
      est.objective[j] = col.objective;
    } catch (const Error& e) {
      if (failures.empty()) first_code = e.code();
      failures += (failures.empty() ? "" : "; ") + std::string(e.what());
    }
  }
  if (!failures.empty()) throw Error(first_code, failures);

  est.omega = config.symmetrize == Symmetrize::min_magnitude
                  ? symmetrize_min_magnitude(est.omega_raw)
                  : est.omega_raw;
  return est;
}

Graph support_graph(const InverseEstimate& est, double tol) {
  return Graph::from_support(symmetrize_min_magnitude(est.omega_raw), tol);
}

}  // namespace tvnpn
