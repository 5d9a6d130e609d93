#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecpcs/allocation.hpp"
#include "ecpcs/caching.hpp"
#include "ecpcs/coverage.hpp"
#include "ecpcs/pricing.hpp"
#include "ecpcs/scenario.hpp"
#include "ecpcs/selection.hpp"

namespace ecpcs {

// One emitted experiment record. scheme is the combined label
// "<selection>+<allocation>+<upload>", e.g. "greedy+optimal+edge_partial".
struct ResultRow {
    std::string experiment_id;
    std::string scheme;
    double eta = 0.0;
    double omega = 0.0;
    double bandwidth_hz = 0.0;
    std::uint64_t seed = 0;
    std::size_t photo_count = 0;
    double total_cost = 0.0;
    double coverage_ratio = 0.0;  // covered target cells / target cells
    double max_delay_s = 0.0;
    std::optional<double> hit_ratio;
};

// Everything the full pipeline produced, for callers that need more than
// the summary row.
struct PipelineArtifacts {
    TargetArea target;
    std::vector<CoverageSet> coverage;
    std::vector<PriceTag> prices;
    SelectionResult selection;
    DelayReport delays;
    std::uint64_t model_id = 0;
    ResultRow row;
};

// Sums the chosen photos into per-participant uplink loads. Every
// participant appears, those without chosen photos with an empty load.
std::vector<ParticipantLoad> selected_loads(const Scenario& scenario,
                                            const std::vector<std::int64_t>& chosen_ids);

// Cache key of the 3-d model reconstructed for a target area.
std::uint64_t model_id_for_target(const TargetArea& target);

// Target estimation, coverage, pricing, greedy selection, min-max
// allocation, delay report, and one cache touch when a cache is supplied.
// Infeasible selection is reported in the row, not thrown.
PipelineArtifacts run_pipeline(const Scenario& scenario, ModelCache* cache = nullptr,
                               const std::string& experiment_id = "pipeline");

// Cross product of the given scheme names on one shared scenario. Selection
// baselines get the same photo budget greedy used; stochastic baselines draw
// from their own seed streams. Throws UnknownScheme on bad names.
std::vector<ResultRow> run_comparison(const Scenario& scenario,
                                      const std::vector<std::string>& selection_schemes,
                                      const std::vector<std::string>& allocation_schemes,
                                      const std::vector<std::string>& upload_schemes,
                                      const std::string& experiment_id = "compare");

enum class OutputFormat { csv, json };
OutputFormat format_from_name(std::string_view name);

// Fixed column order; floats carry 17 significant digits so both formats
// parse back to identical values. Empty input yields a header-only table.
void emit_results(const std::vector<ResultRow>& rows, OutputFormat format,
                  std::ostream& out);
void emit_results_file(const std::vector<ResultRow>& rows, OutputFormat format,
                       const std::string& path);

// 17 significant digits, enough to parse back to the same double.
std::string format_float(double value);

// Small random priced-cover instance (3..12 photos, 8..40 target cells,
// prices in (0, 1], always feasible) for auditing greedy against the exact
// oracle.
SelectionProblem random_audit_instance(Rng& rng);

struct AuditRecord {
    std::uint64_t instance_id = 0;
    double greedy_cost = 0.0;
    double exact_cost = 0.0;
    double ratio = 1.0;
    double bound = 0.0;
    bool violation = false;
};

// Runs `instances` audits, one child seed each.
std::vector<AuditRecord> run_audit(std::size_t instances, std::uint64_t seed);
void emit_audit_json(const std::vector<AuditRecord>& records, std::ostream& out);

// Parsed "selection+allocation+upload" label; omitted parts keep defaults.
struct SchemeCombo {
    std::string selection = "greedy";
    std::string allocation = "optimal";
    std::string upload = "edge_partial";
};
SchemeCombo parse_scheme_label(const std::string& label);

// A sweep: one scenario source, an eta axis, a scheme axis. Rows come out
// ordered by (eta position, scheme position) regardless of execution order.
struct ExperimentSpec {
    std::optional<std::string> scenario_path;
    std::optional<GenerationSpec> generator;
    std::uint64_t seed = 1;
    std::vector<double> etas{0.8};
    std::vector<std::string> schemes{"greedy+optimal+edge_partial"};
    std::string experiment_id = "experiment";

    // Throws ValidationError on an empty sweep axis or missing source.
    void validate() const;
};

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

}  // namespace ecpcs
