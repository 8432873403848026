#pragma once

#include <stdexcept>
#include <string>

namespace vfd {

/// Thrown when no finite quantization noise can make the Wyner-Ziv index
/// rate equal the requested rate (index rate <= 0).
class InfeasibleQuantization : public std::domain_error {
public:
  explicit InfeasibleQuantization(const std::string& what) : std::domain_error(what) {}
};

/// log2(1 + effective_snr) in bits per channel use.
double gaussian_rate(double effective_snr);

/// Quantization noise variance whose Wyner-Ziv index rate
/// log2(1 + (1 + snr_in) / noise) equals index_rate.
double wyner_ziv_noise(double snr_in, double index_rate);

/// Inverse of wyner_ziv_noise: index rate carried by a quantizer with the
/// given noise variance when the observation has signal power snr_in.
double wyner_ziv_rate(double snr_in, double noise);

}  // namespace vfd
