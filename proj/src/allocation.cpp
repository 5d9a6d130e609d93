#include "ecpcs/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecpcs/channel.hpp"
#include "ecpcs/errors.hpp"
#include "ecpcs/parallel.hpp"

namespace ecpcs {

namespace {

void check_loads(const std::vector<ParticipantLoad>& loads) {
    if (loads.empty()) throw DomainError("allocation: no participants");
    for (const ParticipantLoad& l : loads) {
        if (!std::isfinite(l.size_mb) || l.size_mb < 0.0)
            throw DomainError("allocation: invalid load for participant " +
                              std::to_string(l.participant_id));
        if (!std::isfinite(l.snr_linear) || l.snr_linear <= 0.0)
            throw DomainError("allocation: invalid SNR for participant " +
                              std::to_string(l.participant_id));
    }
    std::vector<std::int64_t> ids;
    ids.reserve(loads.size());
    for (const ParticipantLoad& l : loads) ids.push_back(l.participant_id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw DomainError("allocation: duplicate participant ids");
}

void check_bandwidth(double total_hz) {
    if (!std::isfinite(total_hz) || total_hz <= 0.0)
        throw ZeroBandwidth("allocation: total bandwidth must be positive, got " +
                            std::to_string(total_hz));
}

std::size_t count_active(const std::vector<ParticipantLoad>& loads) {
    std::size_t active = 0;
    for (const ParticipantLoad& l : loads) active += l.size_mb > 0.0 ? 1 : 0;
    if (active == 0) throw NoLoad("allocation: every participant has an empty load");
    return active;
}

}  // namespace

double upload_delay(double size_mb, double share_hz, double snr_linear) {
    if (!std::isfinite(size_mb) || size_mb < 0.0)
        throw DomainError("upload delay: invalid payload size " + std::to_string(size_mb));
    if (size_mb == 0.0) return 0.0;
    if (!std::isfinite(share_hz) || share_hz <= 0.0)
        throw ZeroBandwidth("upload delay: positive load needs a positive share");
    return size_mb * kBitsPerMegabyte / uplink_rate(share_hz, snr_linear);
}

std::vector<double> optimal_allocation(const std::vector<ParticipantLoad>& loads,
                                       double total_hz) {
    check_loads(loads);
    check_bandwidth(total_hz);
    count_active(loads);
    std::vector<double> weights(loads.size(), 0.0);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < loads.size(); ++i) {
        if (loads[i].size_mb == 0.0) continue;
        weights[i] = loads[i].size_mb * kBitsPerMegabyte /
                     std::log2(1.0 + loads[i].snr_linear);
        weight_sum += weights[i];
    }
    std::vector<double> shares(loads.size(), 0.0);
    for (std::size_t i = 0; i < loads.size(); ++i)
        shares[i] = total_hz * weights[i] / weight_sum;
    return shares;
}

std::vector<double> fair_allocation(const std::vector<ParticipantLoad>& loads,
                                    double total_hz) {
    check_loads(loads);
    check_bandwidth(total_hz);
    const std::size_t active = count_active(loads);
    std::vector<double> shares(loads.size(), 0.0);
    for (std::size_t i = 0; i < loads.size(); ++i)
        if (loads[i].size_mb > 0.0) shares[i] = total_hz / static_cast<double>(active);
    return shares;
}

std::vector<double> weighted_allocation(const std::vector<ParticipantLoad>& loads,
                                        double total_hz) {
    check_loads(loads);
    check_bandwidth(total_hz);
    count_active(loads);
    double count_sum = 0.0;
    for (const ParticipantLoad& l : loads) {
        if (l.size_mb == 0.0) continue;
        if (l.photo_count == 0)
            throw DomainError("allocation: participant " + std::to_string(l.participant_id) +
                              " has load but no photo count");
        count_sum += static_cast<double>(l.photo_count);
    }
    std::vector<double> shares(loads.size(), 0.0);
    for (std::size_t i = 0; i < loads.size(); ++i) {
        if (loads[i].size_mb == 0.0) continue;
        shares[i] = total_hz * static_cast<double>(loads[i].photo_count) / count_sum;
    }
    return shares;
}

std::vector<double> random_allocation(const std::vector<ParticipantLoad>& loads,
                                      double total_hz, Rng& rng) {
    check_loads(loads);
    check_bandwidth(total_hz);
    count_active(loads);
    std::vector<double> raw(loads.size(), 0.0);
    double raw_sum = 0.0;
    for (std::size_t i = 0; i < loads.size(); ++i) {
        if (loads[i].size_mb == 0.0) continue;
        raw[i] = rng.exponential(1.0);
        raw_sum += raw[i];
    }
    std::vector<double> shares(loads.size(), 0.0);
    for (std::size_t i = 0; i < loads.size(); ++i) shares[i] = total_hz * raw[i] / raw_sum;
    return shares;
}

DelayReport delay_report(const std::vector<ParticipantLoad>& loads,
                         const std::vector<double>& shares) {
    check_loads(loads);
    if (shares.size() != loads.size())
        throw DomainError("allocation: share list does not match participants");
    DelayReport report;
    report.rows.reserve(loads.size());
    for (std::size_t i = 0; i < loads.size(); ++i) {
        AllocationRow row;
        row.participant_id = loads[i].participant_id;
        row.share_hz = shares[i];
        row.delay_s = upload_delay(loads[i].size_mb, shares[i], loads[i].snr_linear);
        report.max_delay_s = std::max(report.max_delay_s, row.delay_s);
        report.rows.push_back(row);
    }
    return report;
}

namespace {

double bottleneck_delay(const std::vector<ParticipantLoad>& loads,
                        const std::vector<double>& shares) {
    double worst = 0.0;
    for (std::size_t i = 0; i < loads.size(); ++i)
        worst = std::max(worst, upload_delay(loads[i].size_mb, shares[i], loads[i].snr_linear));
    return worst;
}

// Minimizes the bottleneck over a single bandwidth transfer between two
// active participants. The objective is a max of convex one-sided curves,
// hence unimodal in the transfer, so a golden-section scan suffices.
double best_transfer(const std::vector<ParticipantLoad>& loads, std::vector<double>& shares,
                     std::size_t from, std::size_t to) {
    constexpr double kGolden = 0.6180339887498949;
    double lo = -shares[to] * (1.0 - 1e-9);
    double hi = shares[from] * (1.0 - 1e-9);
    auto eval = [&](double delta) {
        shares[from] -= delta;
        shares[to] += delta;
        double v = bottleneck_delay(loads, shares);
        shares[from] += delta;
        shares[to] -= delta;
        return v;
    };
    double a = hi - kGolden * (hi - lo);
    double b = lo + kGolden * (hi - lo);
    double fa = eval(a);
    double fb = eval(b);
    for (int it = 0; it < 90; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - kGolden * (hi - lo);
            fa = eval(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + kGolden * (hi - lo);
            fb = eval(b);
        }
    }
    double delta = fa < fb ? a : b;
    double improved = eval(delta);
    shares[from] -= delta;
    shares[to] += delta;
    return improved;
}

}  // namespace

VerificationReport verify_optimum(const std::vector<ParticipantLoad>& loads,
                                  const std::vector<double>& shares, double total_hz,
                                  std::size_t trials, Rng& rng) {
    check_loads(loads);
    check_bandwidth(total_hz);
    if (shares.size() != loads.size())
        throw DomainError("verification: share list does not match participants");
    double share_sum = 0.0;
    for (double s : shares) {
        if (!std::isfinite(s) || s < 0.0)
            throw DomainError("verification: negative or non-finite share");
        share_sum += s;
    }
    if (std::fabs(share_sum - total_hz) > 1e-6 * total_hz)
        throw DomainError("verification: shares sum to " + std::to_string(share_sum) +
                          ", not " + std::to_string(total_hz));
    const DelayReport report = delay_report(loads, shares);

    VerificationReport out;
    out.max_delay_s = report.max_delay_s;
    out.trials = trials;
    constexpr double kRelTol = 1e-9;

    // Condition 1: every active upload finishes at the bottleneck time.
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < loads.size(); ++i) {
        if (loads[i].size_mb == 0.0) continue;
        lo = std::min(lo, report.rows[i].delay_s);
        hi = std::max(hi, report.rows[i].delay_s);
    }
    out.equalization_spread = (hi - lo) / hi;
    if (out.equalization_spread > kRelTol)
        throw OptimalityViolation("allocation: active delays are not equalized, spread " +
                                  std::to_string(out.equalization_spread));

    // Condition 2: no random split does better. Trials draw from their own
    // child streams, so the loop order never affects the outcome.
    std::vector<double> trial_delay(trials, 0.0);
    std::int64_t tn = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(static) if (trials > 8)
    for (std::int64_t t = 0; t < tn; ++t) {
        Rng trial_rng = rng.child("verify-trial", static_cast<std::uint64_t>(t));
        std::vector<double> split = random_allocation(loads, total_hz, trial_rng);
        trial_delay[static_cast<std::size_t>(t)] = bottleneck_delay(loads, split);
    }
    out.best_trial_delay = out.max_delay_s;
    for (double d : trial_delay) out.best_trial_delay = std::min(out.best_trial_delay, d);
    if (out.best_trial_delay < out.max_delay_s * (1.0 - kRelTol))
        throw OptimalityViolation("allocation: a random split beat the closed form: " +
                                  std::to_string(out.best_trial_delay) + " < " +
                                  std::to_string(out.max_delay_s));

    // Condition 3: local search cannot improve either. Starting from the
    // even split, repeatedly move bandwidth between pairs of active
    // participants while it helps.
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < loads.size(); ++i)
        if (loads[i].size_mb > 0.0) active.push_back(i);
    std::vector<double> descent(loads.size(), 0.0);
    for (std::size_t i : active) descent[i] = total_hz / static_cast<double>(active.size());
    double current = bottleneck_delay(loads, descent);
    for (int pass = 0; pass < 60; ++pass) {
        double before = current;
        for (std::size_t i : active) {
            for (std::size_t j : active) {
                if (i == j) continue;
                current = std::min(current, best_transfer(loads, descent, i, j));
            }
        }
        if (before - current <= before * 1e-12) break;
    }
    out.refined_delay = current;
    if (out.refined_delay < out.max_delay_s * (1.0 - kRelTol))
        throw OptimalityViolation("allocation: local search beat the closed form: " +
                                  std::to_string(out.refined_delay) + " < " +
                                  std::to_string(out.max_delay_s));
    return out;
}

std::string_view allocation_scheme_name(AllocationScheme scheme) {
    switch (scheme) {
        case AllocationScheme::optimal: return "optimal";
        case AllocationScheme::fair: return "fair";
        case AllocationScheme::weighted: return "weighted";
        case AllocationScheme::random: return "random";
    }
    throw DomainError("allocation: unknown scheme value");
}

AllocationScheme allocation_scheme_from_name(std::string_view name) {
    if (name == "optimal") return AllocationScheme::optimal;
    if (name == "fair") return AllocationScheme::fair;
    if (name == "weighted") return AllocationScheme::weighted;
    if (name == "random") return AllocationScheme::random;
    throw UnknownScheme("allocation scheme must be optimal, fair, weighted or random, got \"" +
                        std::string(name) + "\"");
}

std::string_view upload_scheme_name(UploadScheme scheme) {
    switch (scheme) {
        case UploadScheme::edge_partial: return "edge_partial";
        case UploadScheme::edge_total: return "edge_total";
        case UploadScheme::cloud_partial: return "cloud_partial";
    }
    throw DomainError("allocation: unknown upload scheme value");
}

UploadScheme upload_scheme_from_name(std::string_view name) {
    if (name == "edge_partial") return UploadScheme::edge_partial;
    if (name == "edge_total") return UploadScheme::edge_total;
    if (name == "cloud_partial") return UploadScheme::cloud_partial;
    throw UnknownScheme(
        "upload scheme must be edge_partial, edge_total or cloud_partial, got \"" +
        std::string(name) + "\"");
}

DelayReport upload_scheme_delay(UploadScheme scheme,
                                const std::vector<ParticipantLoad>& selected,
                                const std::vector<ParticipantLoad>& all,
                                double total_hz,
                                const std::optional<BackhaulModel>& backhaul) {
    check_loads(selected);
    check_loads(all);
    if (selected.size() != all.size())
        throw DomainError("upload schemes: load lists differ in length");
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (selected[i].participant_id != all[i].participant_id)
            throw DomainError("upload schemes: participant id mismatch at position " +
                              std::to_string(i));
        if (selected[i].size_mb > all[i].size_mb)
            throw DomainError("upload schemes: chosen load exceeds total for participant " +
                              std::to_string(all[i].participant_id));
    }

    switch (scheme) {
        case UploadScheme::edge_partial:
            return delay_report(selected, optimal_allocation(selected, total_hz));
        case UploadScheme::edge_total:
            return delay_report(all, optimal_allocation(all, total_hz));
        case UploadScheme::cloud_partial: break;
    }

    if (!backhaul)
        throw MissingBackhaul("upload schemes: cloud_partial needs a backhaul model");
    if (!std::isfinite(backhaul->rate_bps) || backhaul->rate_bps <= 0.0)
        throw DomainError("upload schemes: backhaul rate must be positive");
    if (!std::isfinite(backhaul->wan_rtt_s) || backhaul->wan_rtt_s < 0.0)
        throw DomainError("upload schemes: negative round trip time");

    DelayReport report = delay_report(selected, optimal_allocation(selected, total_hz));
    double total_bits = 0.0;
    for (const ParticipantLoad& l : selected) total_bits += l.size_mb * kBitsPerMegabyte;
    const double penalty = total_bits / backhaul->rate_bps + backhaul->wan_rtt_s;
    report.max_delay_s = 0.0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (selected[i].size_mb > 0.0) report.rows[i].delay_s += penalty;
        report.max_delay_s = std::max(report.max_delay_s, report.rows[i].delay_s);
    }
    return report;
}

}  // namespace ecpcs
