#include "acp/channel.hpp"

#include <cmath>

#include "acp/errors.hpp"
#include "acp/units.hpp"

namespace acp {

double path_loss_db(double distance_m, double fc_ghz) {
  if (distance_m <= 0) throw DomainError("path loss needs positive distance");
  if (fc_ghz <= 0) throw DomainError("path loss needs positive center frequency");
  return 32.4 + 20.0 * std::log10(distance_m) + 20.0 * std::log10(fc_ghz);
}

LinkState make_link(double distance_m, const RadioParams& radio) {
  const double loss_db = path_loss_db(distance_m, radio.fc_ghz);
  return LinkState{distance_m, units::db_to_linear(-loss_db)};
}

double snr_linear(const LinkState& link, const RadioParams& radio) {
  const double p = units::dbm_to_watt(radio.tx_power_dbm);
  const double n = units::dbm_to_watt(radio.noise_dbm);
  return p * link.gain / n;
}

double spectral_efficiency(const LinkState& link, const RadioParams& radio) {
  return units::log2_ratio(1.0 + snr_linear(link, radio));
}

double link_rate(double beta, double bandwidth_hz, const LinkState& link,
                 const RadioParams& radio) {
  if (beta < 0 || beta > 1) throw DomainError("beta must lie in [0,1]");
  if (bandwidth_hz < 0) throw DomainError("bandwidth must be non-negative");
  if (beta == 0 || bandwidth_hz == 0) return 0.0;
  return beta * bandwidth_hz * spectral_efficiency(link, radio);
}

}  // namespace acp
