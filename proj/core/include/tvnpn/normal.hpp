#pragma once

namespace tvnpn {

double std_normal_pdf(double x) noexcept;
double std_normal_cdf(double x) noexcept;

/// Phi^{-1}(p) for p in (0,1): rational approximation polished by one
/// Halley step. Throws Error(domain) outside (0,1).
double std_normal_quantile(double p);

}  // namespace tvnpn
