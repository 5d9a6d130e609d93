// Command-line front end: generate scenes, run the selection/allocation
// pipeline and baselines, exercise the cache, audit the greedy bound.
// Exit codes: 0 success, 2 infeasible selection, 3 config error,
// 4 internal invariant violation.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecpcs/errors.hpp"
#include "ecpcs/harness.hpp"

namespace {

using ecpcs::Scenario;

struct CommonOpts {
    std::string scenario_path;
    std::string preset = "gate";
    std::uint64_t seed = 1;
    std::vector<double> etas;
    std::optional<double> omega;
    std::optional<double> bandwidth_mhz;
    std::optional<std::uint32_t> threshold;
    std::string format = "csv";
    std::string out;
};

void add_scenario_opts(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--scenario", c.scenario_path, "Scenario JSON file to load");
    sub->add_option("--preset", c.preset, "Scene preset: gate or temple")
        ->default_str("gate");
    sub->add_option("--seed", c.seed, "Scene generation seed");
    sub->add_option("--eta", c.etas, "Required coverage ratio in (0, 1]");
    sub->add_option("--omega", c.omega, "Price scaling factor");
    sub->add_option("--bandwidth-mhz", c.bandwidth_mhz, "Total uplink bandwidth in MHz");
    sub->add_option("--threshold", c.threshold, "Target-area coverage threshold");
}

void add_output_opts(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--format", c.format, "Output format: csv or json")->default_str("csv");
    sub->add_option("--out", c.out, "Output path (stdout when omitted)");
}

ecpcs::GenerationSpec preset_spec(const CommonOpts& c) {
    ecpcs::GenerationSpec spec;
    if (c.preset == "gate" || c.preset == "gate-like") {
        spec = ecpcs::GenerationSpec::gate_like();
    } else if (c.preset == "temple" || c.preset == "temple-like") {
        spec = ecpcs::GenerationSpec::temple_like();
    } else {
        throw ecpcs::BadSpec("preset must be gate or temple, got \"" + c.preset + "\"");
    }
    return spec;
}

// Loads or generates the scene, then applies the flag overrides. Sweeping
// verbs handle --eta themselves; the rest accept at most one value.
Scenario build_scenario(const CommonOpts& c, bool allow_eta_sweep) {
    Scenario s = c.scenario_path.empty()
                     ? ecpcs::generate_scene(preset_spec(c), c.seed)
                     : ecpcs::load_scenario(c.scenario_path);
    if (!allow_eta_sweep && c.etas.size() > 1)
        throw ecpcs::DomainError("this verb takes a single --eta value");
    if (!c.etas.empty()) s.params.eta = c.etas.front();
    if (c.omega) s.params.omega = *c.omega;
    if (c.bandwidth_mhz) s.params.total_bandwidth_hz = *c.bandwidth_mhz * 1e6;
    if (c.threshold) s.params.target_threshold = *c.threshold;
    s.validate();
    return s;
}

void write_text(const std::string& out_path,
                const std::function<void(std::ostream&)>& body) {
    if (out_path.empty()) {
        body(std::cout);
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ecpcs::IoError("cannot open " + out_path + " for writing");
    body(out);
    if (!out) throw ecpcs::IoError("failed writing " + out_path);
}

bool any_positive_load(const std::vector<ecpcs::ParticipantLoad>& loads) {
    for (const auto& l : loads)
        if (l.size_mb > 0.0) return true;
    return false;
}

int cmd_generate(const CommonOpts& c) {
    if (!c.scenario_path.empty())
        throw ecpcs::DomainError("generate builds a new scene; --scenario is not accepted");
    ecpcs::GenerationSpec spec = preset_spec(c);
    if (c.etas.size() > 1) throw ecpcs::DomainError("generate takes a single --eta value");
    if (!c.etas.empty()) spec.params.eta = c.etas.front();
    if (c.omega) spec.params.omega = *c.omega;
    if (c.bandwidth_mhz) spec.params.total_bandwidth_hz = *c.bandwidth_mhz * 1e6;
    if (c.threshold) spec.params.target_threshold = *c.threshold;
    ecpcs::save_scenario(ecpcs::generate_scene(spec, c.seed), c.out);
    return 0;
}

int cmd_select(const CommonOpts& c) {
    const Scenario scenario = build_scenario(c, false);
    const ecpcs::PipelineArtifacts art = ecpcs::run_pipeline(scenario);

    // Per-photo lookup tables for the chosen set.
    std::map<std::int64_t, const ecpcs::PriceTag*> price_of;
    for (const auto& p : art.prices) price_of[p.photo_id] = &p;
    std::map<std::int64_t, std::size_t> cover_of;
    for (const auto& s : art.coverage) cover_of[s.photo_id] = s.cells.size();
    std::map<std::int64_t, const ecpcs::PhotoMeta*> photo_of;
    for (const auto& part : scenario.participants)
        for (const auto& ph : part.photos) photo_of[ph.photo_id()] = &ph;

    const ecpcs::OutputFormat format = ecpcs::format_from_name(c.format);
    write_text(c.out, [&](std::ostream& out) {
        if (format == ecpcs::OutputFormat::csv) {
            out << "photo_id,participant_id,price,size_mb,covered_target_cells\n";
            for (std::int64_t id : art.selection.chosen_ids) {
                const ecpcs::PhotoMeta* ph = photo_of.at(id);
                out << id << ',' << ph->participant_id() << ','
                    << ecpcs::format_float(price_of.at(id)->price) << ','
                    << ecpcs::format_float(ph->size_mb()) << ',' << cover_of.at(id) << '\n';
            }
        } else {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (std::int64_t id : art.selection.chosen_ids) {
                const ecpcs::PhotoMeta* ph = photo_of.at(id);
                nlohmann::ordered_json j;
                j["photo_id"] = id;
                j["participant_id"] = ph->participant_id();
                j["price"] = price_of.at(id)->price;
                j["size_mb"] = ph->size_mb();
                j["covered_target_cells"] = cover_of.at(id);
                arr.push_back(std::move(j));
            }
            out << arr.dump(2) << '\n';
        }
    });
    return art.selection.feasible ? 0 : 2;
}

int cmd_allocate(const CommonOpts& c, const std::vector<std::string>& schemes) {
    const Scenario scenario = build_scenario(c, false);
    const ecpcs::PipelineArtifacts art = ecpcs::run_pipeline(scenario);
    const std::vector<ecpcs::ParticipantLoad> loads =
        ecpcs::selected_loads(scenario, art.selection.chosen_ids);

    struct Row {
        std::string scheme;
        ecpcs::AllocationRow alloc;
        double max_delay_s;
    };
    std::vector<Row> rows;
    const double bandwidth = scenario.params.total_bandwidth_hz;
    for (std::size_t si = 0; si < schemes.size(); ++si) {
        const ecpcs::AllocationScheme scheme =
            ecpcs::allocation_scheme_from_name(schemes[si]);
        ecpcs::DelayReport report;
        if (!any_positive_load(loads)) {
            for (const auto& l : loads)
                report.rows.push_back(ecpcs::AllocationRow{l.participant_id, 0.0, 0.0});
        } else {
            std::vector<double> shares;
            switch (scheme) {
                case ecpcs::AllocationScheme::optimal:
                    shares = ecpcs::optimal_allocation(loads, bandwidth);
                    break;
                case ecpcs::AllocationScheme::fair:
                    shares = ecpcs::fair_allocation(loads, bandwidth);
                    break;
                case ecpcs::AllocationScheme::weighted:
                    shares = ecpcs::weighted_allocation(loads, bandwidth);
                    break;
                case ecpcs::AllocationScheme::random: {
                    ecpcs::Rng rng = ecpcs::Rng(scenario.params.seed).child("rras", si);
                    shares = ecpcs::random_allocation(loads, bandwidth, rng);
                    break;
                }
            }
            report = ecpcs::delay_report(loads, shares);
        }
        for (const auto& r : report.rows)
            rows.push_back(Row{schemes[si], r, report.max_delay_s});
    }

    const ecpcs::OutputFormat format = ecpcs::format_from_name(c.format);
    write_text(c.out, [&](std::ostream& out) {
        if (format == ecpcs::OutputFormat::csv) {
            out << "scheme,participant_id,share_hz,delay_s,max_delay_s\n";
            for (const Row& r : rows)
                out << r.scheme << ',' << r.alloc.participant_id << ','
                    << ecpcs::format_float(r.alloc.share_hz) << ','
                    << ecpcs::format_float(r.alloc.delay_s) << ','
                    << ecpcs::format_float(r.max_delay_s) << '\n';
        } else {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const Row& r : rows) {
                nlohmann::ordered_json j;
                j["scheme"] = r.scheme;
                j["participant_id"] = r.alloc.participant_id;
                j["share_hz"] = r.alloc.share_hz;
                j["delay_s"] = r.alloc.delay_s;
                j["max_delay_s"] = r.max_delay_s;
                arr.push_back(std::move(j));
            }
            out << arr.dump(2) << '\n';
        }
    });
    return art.selection.feasible ? 0 : 2;
}

int cmd_cache(std::uint64_t seed, std::size_t capacity, double alpha, std::size_t models,
              std::size_t requests, const std::string& format_name,
              const std::string& out_path) {
    std::vector<ecpcs::ModelEntry> catalog;
    catalog.reserve(models);
    double mass = 0.0;
    for (std::size_t i = 1; i <= models; ++i)
        mass += std::pow(static_cast<double>(i), -alpha);
    for (std::size_t i = 1; i <= models; ++i)
        catalog.push_back(ecpcs::ModelEntry{
            i, 1, std::pow(static_cast<double>(i), -alpha) / mass});

    ecpcs::Rng rng = ecpcs::Rng(seed).child("zipf");
    const std::vector<std::uint64_t> stream =
        ecpcs::zipf_requests(models, alpha, requests, rng);
    const ecpcs::CacheSimReport report = ecpcs::simulate_cache(
        capacity, catalog, stream, ecpcs::PopularityMode::static_score);

    const ecpcs::OutputFormat format = ecpcs::format_from_name(format_name);
    write_text(out_path, [&](std::ostream& out) {
        if (format == ecpcs::OutputFormat::csv) {
            out << "capacity,alpha,n,requests,hit_ratio\n";
            out << capacity << ',' << ecpcs::format_float(alpha) << ',' << models << ','
                << requests << ',' << ecpcs::format_float(report.hit_ratio) << '\n';
        } else {
            nlohmann::ordered_json j;
            j["capacity"] = capacity;
            j["alpha"] = alpha;
            j["n"] = models;
            j["requests"] = requests;
            j["hit_ratio"] = report.hit_ratio;
            out << j.dump(2) << '\n';
        }
    });
    return 0;
}

int cmd_pipeline(const CommonOpts& c) {
    Scenario scenario = build_scenario(c, true);
    std::vector<double> etas = c.etas;
    if (etas.empty()) etas.push_back(scenario.params.eta);

    std::vector<ecpcs::ResultRow> rows;
    bool feasible = true;
    for (double eta : etas) {
        scenario.params.eta = eta;
        const ecpcs::PipelineArtifacts art = ecpcs::run_pipeline(scenario);
        rows.push_back(art.row);
        feasible = feasible && art.selection.feasible;
    }

    const ecpcs::OutputFormat format = ecpcs::format_from_name(c.format);
    write_text(c.out, [&](std::ostream& out) { ecpcs::emit_results(rows, format, out); });
    return feasible ? 0 : 2;
}

int cmd_compare(const CommonOpts& c, const std::vector<std::string>& scheme_labels) {
    const Scenario scenario = build_scenario(c, false);
    std::vector<std::string> labels = scheme_labels;
    if (labels.empty()) labels = {"greedy", "rpss", "cpss"};

    std::vector<ecpcs::ResultRow> rows;
    for (const std::string& label : labels) {
        const ecpcs::SchemeCombo combo = ecpcs::parse_scheme_label(label);
        std::vector<ecpcs::ResultRow> part =
            ecpcs::run_comparison(scenario, {combo.selection}, {combo.allocation},
                                  {combo.upload}, "compare");
        rows.insert(rows.end(), part.begin(), part.end());
    }

    const ecpcs::OutputFormat format = ecpcs::format_from_name(c.format);
    write_text(c.out, [&](std::ostream& out) { ecpcs::emit_results(rows, format, out); });
    return 0;
}

int cmd_audit(std::size_t instances, std::uint64_t seed, const std::string& out_path) {
    const std::vector<ecpcs::AuditRecord> records = ecpcs::run_audit(instances, seed);
    write_text(out_path,
               [&](std::ostream& out) { ecpcs::emit_audit_json(records, out); });
    bool violated = false;
    double worst = 0.0;
    for (const auto& r : records) {
        violated = violated || r.violation;
        worst = std::max(worst, r.ratio / r.bound);
    }
    std::cerr << "audited " << records.size() << " instances, worst ratio/bound "
              << ecpcs::format_float(worst) << (violated ? " (BOUND VIOLATED)" : "")
              << '\n';
    return violated ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge photo crowdsourcing pipeline"};
    app.require_subcommand(1);

    CommonOpts gen_c, sel_c, alloc_c, pipe_c, cmp_c;
    std::vector<std::string> alloc_schemes{"optimal", "fair", "weighted", "random"};
    std::vector<std::string> cmp_schemes;
    std::uint64_t cache_seed = 1, audit_seed = 1;
    std::size_t cache_capacity = 10, cache_models = 100, cache_requests = 100000;
    double cache_alpha = 0.8;
    std::string cache_format = "csv", cache_out;
    std::size_t audit_instances = 200;
    std::string audit_out;

    CLI::App* gen = app.add_subcommand("generate", "Generate a scene and write it to a file");
    add_scenario_opts(gen, gen_c);
    gen->add_option("--out", gen_c.out, "Scenario output path")->required();

    CLI::App* sel = app.add_subcommand("select", "Run selection and list the chosen photos");
    add_scenario_opts(sel, sel_c);
    add_output_opts(sel, sel_c);

    CLI::App* alloc = app.add_subcommand("allocate", "Allocate bandwidth for the chosen photos");
    add_scenario_opts(alloc, alloc_c);
    add_output_opts(alloc, alloc_c);
    alloc->add_option("--scheme", alloc_schemes,
                      "Allocation schemes: optimal, fair, weighted, random");

    CLI::App* cache = app.add_subcommand("cache", "Simulate the model cache under Zipf load");
    cache->add_option("--seed", cache_seed, "Request stream seed");
    cache->add_option("--capacity", cache_capacity, "Cache capacity in units");
    cache->add_option("--alpha", cache_alpha, "Zipf skew");
    cache->add_option("--models", cache_models, "Catalog size");
    cache->add_option("--requests", cache_requests, "Request count");
    cache->add_option("--format", cache_format, "Output format: csv or json");
    cache->add_option("--out", cache_out, "Output path (stdout when omitted)");

    CLI::App* pipe = app.add_subcommand("pipeline", "Run the full pipeline, sweeping --eta");
    add_scenario_opts(pipe, pipe_c);
    add_output_opts(pipe, pipe_c);

    CLI::App* cmp = app.add_subcommand("compare", "Compare scheme combinations on one scene");
    add_scenario_opts(cmp, cmp_c);
    add_output_opts(cmp, cmp_c);
    cmp->add_option("--scheme", cmp_schemes,
                    "Scheme labels like greedy+optimal+edge_partial (repeatable)");

    CLI::App* audit = app.add_subcommand("audit", "Audit greedy cost against the exact oracle");
    audit->add_option("--instances", audit_instances, "Number of random instances");
    audit->add_option("--seed", audit_seed, "Instance stream seed");
    audit->add_option("--out", audit_out, "Output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_c);
        if (sel->parsed()) return cmd_select(sel_c);
        if (alloc->parsed()) return cmd_allocate(alloc_c, alloc_schemes);
        if (cache->parsed())
            return cmd_cache(cache_seed, cache_capacity, cache_alpha, cache_models,
                             cache_requests, cache_format, cache_out);
        if (pipe->parsed()) return cmd_pipeline(pipe_c);
        if (cmp->parsed()) return cmd_compare(cmp_c, cmp_schemes);
        if (audit->parsed()) return cmd_audit(audit_instances, audit_seed, audit_out);
    } catch (const ecpcs::OptimalityViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const ecpcs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 3;
}
