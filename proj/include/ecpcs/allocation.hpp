#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ecpcs/rng.hpp"

namespace ecpcs {

// One uploader's pending traffic: total payload of its chosen photos and the
// uplink SNR it sees. photo_count backs the weighted baseline.
struct ParticipantLoad {
    std::int64_t participant_id = 0;
    double size_mb = 0.0;
    std::size_t photo_count = 0;
    double snr_linear = 1.0;
};

inline constexpr double kBitsPerMegabyte = 8e6;

// Transmission time of size_mb over a share_hz slice at the given SNR.
// A participant with nothing to send takes zero time on any share; a
// positive load on a zero share is an error rather than an infinite delay.
double upload_delay(double size_mb, double share_hz, double snr_linear);

// Bandwidth split minimizing the slowest upload: share_m proportional to
// load_m / log2(1 + snr_m). Zero-load participants get a zero share. All
// schemes return shares aligned with `loads` and summing to total_hz.
std::vector<double> optimal_allocation(const std::vector<ParticipantLoad>& loads,
                                       double total_hz);

// Equal split among participants with positive load.
std::vector<double> fair_allocation(const std::vector<ParticipantLoad>& loads,
                                    double total_hz);

// Split proportional to chosen photo counts.
std::vector<double> weighted_allocation(const std::vector<ParticipantLoad>& loads,
                                        double total_hz);

// Flat Dirichlet split over the positive-load participants.
std::vector<double> random_allocation(const std::vector<ParticipantLoad>& loads,
                                      double total_hz, Rng& rng);

struct AllocationRow {
    std::int64_t participant_id = 0;
    double share_hz = 0.0;
    double delay_s = 0.0;
};

struct DelayReport {
    std::vector<AllocationRow> rows;
    double max_delay_s = 0.0;
};

DelayReport delay_report(const std::vector<ParticipantLoad>& loads,
                         const std::vector<double>& shares);

struct VerificationReport {
    double max_delay_s = 0.0;          // the closed form's bottleneck delay
    double equalization_spread = 0.0;  // relative spread of positive-load delays
    std::size_t trials = 0;
    double best_trial_delay = 0.0;     // best bottleneck over random splits
    double refined_delay = 0.0;        // best found by pairwise-transfer descent
};

// Checks a claimed min-max optimum (normally the closed form's output):
// positive-load delays must coincide (within 1e-9 relative), and neither
// `trials` random splits nor a pairwise bandwidth-transfer descent may beat
// it by more than the same tolerance. Throws OptimalityViolation otherwise;
// DomainError when `shares` is not even a feasible split of total_hz.
VerificationReport verify_optimum(const std::vector<ParticipantLoad>& loads,
                                  const std::vector<double>& shares, double total_hz,
                                  std::size_t trials, Rng& rng);

enum class AllocationScheme { optimal, fair, weighted, random };
enum class UploadScheme { edge_partial, edge_total, cloud_partial };

std::string_view allocation_scheme_name(AllocationScheme scheme);
AllocationScheme allocation_scheme_from_name(std::string_view name);
std::string_view upload_scheme_name(UploadScheme scheme);
UploadScheme upload_scheme_from_name(std::string_view name);

// Backhaul between the edge and the remote cloud.
struct BackhaulModel {
    double rate_bps = 0.0;
    double wan_rtt_s = 0.0;

    friend bool operator==(const BackhaulModel&, const BackhaulModel&) = default;
};

// Delay of a full upload round under the given scheme. edge_partial sends
// only the chosen photos to the edge; edge_total sends everything;
// cloud_partial sends the chosen photos onward over the backhaul, adding
// the forwarding time and round trip to every active uploader's delay.
DelayReport upload_scheme_delay(UploadScheme scheme,
                                const std::vector<ParticipantLoad>& selected,
                                const std::vector<ParticipantLoad>& all,
                                double total_hz,
                                const std::optional<BackhaulModel>& backhaul);

}  // namespace ecpcs
