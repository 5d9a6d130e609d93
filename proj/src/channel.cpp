#include "ecpcs/channel.hpp"

#include <cmath>

namespace ecpcs {

double gamma_threshold(double ber) {
    if (!(ber > 0.0) || !(ber < 0.2)) {
        throw DomainError("gamma_threshold: ber must be in (0, 0.2)");
    }
    return -2.0 * std::log(5.0 * ber) / 3.0;
}

double snr_from_physical(const PhysicalChannel& p) {
    if (!(p.tx_power_w > 0.0)) throw DomainError("snr_from_physical: tx_power_w must be positive");
    if (!(p.fading_coeff > 0.0)) throw DomainError("snr_from_physical: fading_coeff must be positive");
    if (!(p.distance_m > 0.0)) throw DomainError("snr_from_physical: distance_m must be positive");
    if (!(p.pathloss_exp > 0.0)) throw DomainError("snr_from_physical: pathloss_exp must be positive");
    if (!(p.noise_w > 0.0)) throw DomainError("snr_from_physical: noise_w must be positive");
    const double gamma = gamma_threshold(p.target_ber);
    return p.tx_power_w * p.fading_coeff * p.fading_coeff /
           (gamma * std::pow(p.distance_m, p.pathloss_exp) * p.noise_w);
}

double uplink_rate(double bandwidth_hz, double snr_linear) {
    if (!(bandwidth_hz >= 0.0)) throw DomainError("uplink_rate: bandwidth_hz must be nonnegative");
    if (!(snr_linear > 0.0)) throw DomainError("uplink_rate: snr_linear must be positive");
    return bandwidth_hz * std::log2(1.0 + snr_linear);
}

}  // namespace ecpcs
