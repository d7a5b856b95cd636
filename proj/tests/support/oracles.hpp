#pragma once

// Reference implementations used only by the tests. Each one follows the
// textbook definition with plain loops and shares no code with the library
// routine it checks.

#include "tvnpn/datamodel.hpp"
#include "tvnpn/kendall.hpp"

#include <optional>
#include <vector>

namespace tvnpn::oracle {

struct BrutePairs {
  Vector w_row;                      ///< per dataset row, zero outside the window
  std::vector<Matrix> s_row;         ///< per dataset row, full d x d
  double w_total = 0.0;
  Matrix s_total;
};

/// Literal double loop over all ordered pairs i != i'.
BrutePairs pairs(const Dataset& data, const KernelSpec& spec, double z0);

/// tau-hat as the ratio of the literal double sums.
Matrix tau(const Dataset& data, const KernelSpec& spec, double z0);

/// Leave-one-out variance by a triple loop (sample s, partner i', entries
/// a,b) with full d x d matrices.
double jackknife(const Dataset& data, const KernelSpec& spec, double z0, const Matrix& omega,
                 Index j, Index k);

struct BruteDraw {
  Matrix tau_b;
  double un_omega_b = 0.0;
};

/// Multiplier draw by the double loop over (xi_i + xi_i') terms.
BruteDraw bootstrap(const Dataset& data, const KernelSpec& spec, double z0, const Vector& xi);

/// Score Omega_j'(Sigma w - e_k) with w = column k of omega, entry j set to
/// zero, by explicit loops.
double score(const Matrix& sigma, const Matrix& omega, Index j, Index k);

struct LpVertex {
  Vector x;
  double objective = 0.0;
};

/// min c'x over {x : G x <= h} by enumerating every basic solution (n active
/// rows out of G's rows). nullopt when no basic solution is feasible. The
/// polyhedron must be pointed and the objective bounded below on it.
std::optional<LpVertex> enumerate_lp(const Vector& c, const Matrix& g, const Vector& h,
                                     double tol = 1e-9);

/// min ||b||_1 s.t. ||S b - e_j||_inf <= lambda, solved orthant by orthant
/// with enumerate_lp.
std::optional<LpVertex> clime(const Matrix& sigma, Index j, double lambda);

/// Calibrated program, x = (b, kappa), objective ||b||_1 + gamma kappa.
std::optional<LpVertex> calibrated_clime(const Matrix& sigma, Index j, double lambda,
                                         double gamma);

/// Phi^{-1}(p) by bisection on a positive-term erf series in long double.
double normal_quantile(double p);

/// Weighted second-moment matrix by a literal sum per entry.
Matrix pearson(const Dataset& data, const KernelSpec& spec, double z0);

/// Random correlation matrix: normalized Gram matrix of d x (d + extra)
/// Gaussian entries.
Matrix random_correlation(Index d, std::uint64_t seed, Index extra = 2);

/// Dataset with z ~ U(0.02, 0.98) and Gaussian x.
Dataset random_dataset(Index n, Index d, std::uint64_t seed);

}  // namespace tvnpn::oracle
