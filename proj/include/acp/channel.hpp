#pragma once

namespace acp {

struct RadioParams {
  double fc_ghz = 6.0;
  double tx_power_dbm = 23.0;
  double noise_dbm = -104.0;
  double total_bandwidth_hz = 10.5e6;
};

struct LinkState {
  double distance_m = 0;
  double gain = 0;  // linear channel power gain, 10^(-L_dB/10)
};

// Highway V2V path loss: 32.4 + 20 log10(D_m) + 20 log10(fc_GHz), in dB.
// Throws DomainError for non-positive distance or frequency.
double path_loss_db(double distance_m, double fc_ghz);

LinkState make_link(double distance_m, const RadioParams& radio);

double snr_linear(const LinkState& link, const RadioParams& radio);

// log2(1 + SNR), bits/s/Hz.
double spectral_efficiency(const LinkState& link, const RadioParams& radio);

// beta * B_avail * log2(1 + SNR). beta in [0,1]; beta = 0 gives 0.
double link_rate(double beta, double bandwidth_hz, const LinkState& link,
                 const RadioParams& radio);

}  // namespace acp
