#include "vfd/info_core.hpp"

#include <cmath>
#include <numbers>

namespace vfd {

namespace {

void require_nonnegative(double x, const char* what) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::domain_error(std::string(what) + " must be finite and >= 0, got " + std::to_string(x));
  }
}

}  // namespace

double gaussian_rate(double effective_snr) {
  require_nonnegative(effective_snr, "effective_snr");
  return std::log1p(effective_snr) / std::numbers::ln2;
}

double wyner_ziv_noise(double snr_in, double index_rate) {
  require_nonnegative(snr_in, "snr_in");
  if (std::isnan(index_rate) || index_rate <= 0.0) {
    throw InfeasibleQuantization("Wyner-Ziv index rate must be > 0, got " + std::to_string(index_rate));
  }
  // expm1 keeps 2^r - 1 accurate for small r.
  return (1.0 + snr_in) / std::expm1(index_rate * std::numbers::ln2);
}

double wyner_ziv_rate(double snr_in, double noise) {
  require_nonnegative(snr_in, "snr_in");
  if (std::isnan(noise) || noise <= 0.0) {
    throw std::domain_error("quantization noise must be > 0, got " + std::to_string(noise));
  }
  return std::log1p((1.0 + snr_in) / noise) / std::numbers::ln2;
}

}  // namespace vfd
