#pragma once

#include <optional>

#include "ecpcs/errors.hpp"
#include "ecpcs/rng.hpp"

namespace ecpcs {

// Physical parameters behind an SNR sample. Units: watts, meters;
// fading_coeff is the Rayleigh amplitude h (the formula uses |h|^2);
// target_ber is the uplink bit error rate in (0, 0.2).
struct PhysicalChannel {
    double tx_power_w = 0.0;
    double fading_coeff = 1.0;
    double distance_m = 0.0;
    double pathloss_exp = 2.0;
    double noise_w = 0.0;
    double target_ber = 1e-3;

    friend bool operator==(const PhysicalChannel&, const PhysicalChannel&) = default;
};

// Minimum SNR that achieves the target bit error rate: -2*ln(5*ber)/3.
// Valid for ber in (0, 0.2); the value is strictly positive there.
double gamma_threshold(double ber);

// SNR from the physical link model: p_u*|h|^2 / (gamma(ber) * d^beta * N0).
double snr_from_physical(const PhysicalChannel& p);

// Shannon uplink rate in bps: bandwidth_hz * log2(1 + snr_linear).
// Zero bandwidth yields zero rate.
double uplink_rate(double bandwidth_hz, double snr_linear);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

// Unit-mean exponential power gain |h|^2 of a Rayleigh fading amplitude.
inline double rayleigh_power_gain(Rng& rng) { return rng.exponential(1.0); }

// SNR between a participant and the MEC server, stored in linear scale.
// dB appears only at config boundaries. Two construction paths: direct SNR
// sampling (the experiment default) or the physical link model.
class ChannelState {
public:
    static ChannelState from_linear(double snr_linear) {
        if (!(snr_linear > 0.0) || !std::isfinite(snr_linear))
            throw DomainError("ChannelState: snr_linear must be positive");
        return ChannelState(snr_linear, std::nullopt);
    }

    static ChannelState from_db(double snr_db) { return from_linear(db_to_linear(snr_db)); }

    static ChannelState from_physical(const PhysicalChannel& p) {
        return ChannelState(snr_from_physical(p), p);
    }

    double snr_linear() const { return snr_linear_; }
    double snr_db() const { return linear_to_db(snr_linear_); }
    const std::optional<PhysicalChannel>& physical() const { return physical_; }

    friend bool operator==(const ChannelState&, const ChannelState&) = default;

private:
    ChannelState(double snr_linear, std::optional<PhysicalChannel> physical)
        : snr_linear_(snr_linear), physical_(physical) {}

    double snr_linear_;
    std::optional<PhysicalChannel> physical_;
};

// Bandwidth share together with the rate it sustains.
struct LinkBudget {
    double bandwidth_hz = 0.0;
    double rate_bps = 0.0;
};

inline LinkBudget make_link_budget(double bandwidth_hz, double snr_linear) {
    return {bandwidth_hz, uplink_rate(bandwidth_hz, snr_linear)};
}

}  // namespace ecpcs
