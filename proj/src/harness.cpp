#include "ecpcs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "ecpcs/errors.hpp"
#include "ecpcs/parallel.hpp"

namespace ecpcs {

std::vector<ParticipantLoad> selected_loads(const Scenario& scenario,
                                            const std::vector<std::int64_t>& chosen_ids) {
    std::vector<ParticipantLoad> loads = scenario.total_loads();
    for (ParticipantLoad& l : loads) {
        l.size_mb = 0.0;
        l.photo_count = 0;
    }
    for (std::int64_t id : chosen_ids) {
        bool found = false;
        for (std::size_t m = 0; m < scenario.participants.size() && !found; ++m) {
            for (const PhotoMeta& ph : scenario.participants[m].photos) {
                if (ph.photo_id() != id) continue;
                loads[m].size_mb += ph.size_mb();
                loads[m].photo_count += 1;
                found = true;
                break;
            }
        }
        if (!found)
            throw DomainError("harness: chosen photo " + std::to_string(id) +
                              " is not in the scenario");
    }
    return loads;
}

std::uint64_t model_id_for_target(const TargetArea& target) {
    std::string text;
    text.reserve(target.cells.size() * 8);
    for (CellKey c : target.cells) {
        text += std::to_string(c);
        text += ',';
    }
    return fnv1a64(text);
}

namespace {

struct Prepared {
    std::vector<PhotoMeta> photos;
    TargetArea target;
    std::vector<CoverageSet> coverage;
    std::vector<PriceTag> prices;
};

Prepared prepare(const Scenario& scenario) {
    Prepared pre;
    pre.photos = scenario.all_photos();
    SensingGrid grid = scenario.grid;  // scratch copy; the scenario stays untouched
    grid.reset_coverage_counts();
    pre.target = estimate_target_area(pre.photos, grid, scenario.params.target_threshold);
    pre.coverage = coverage_sets(pre.photos, pre.target, grid);
    pre.prices = price_all(pre.photos, scenario.channels_by_participant(),
                           scenario.params.now_min, scenario.params.omega);
    return pre;
}

SelectionProblem make_problem(const Prepared& pre, double eta) {
    return SelectionProblem{pre.coverage, pre.prices, pre.target.cells.size(), eta};
}

bool any_positive(const std::vector<ParticipantLoad>& loads) {
    for (const ParticipantLoad& l : loads)
        if (l.size_mb > 0.0) return true;
    return false;
}

DelayReport zero_report(const std::vector<ParticipantLoad>& loads) {
    DelayReport r;
    for (const ParticipantLoad& l : loads)
        r.rows.push_back(AllocationRow{l.participant_id, 0.0, 0.0});
    return r;
}

}  // namespace

PipelineArtifacts run_pipeline(const Scenario& scenario, ModelCache* cache,
                               const std::string& experiment_id) {
    scenario.validate();
    Prepared pre = prepare(scenario);

    PipelineArtifacts art;
    art.target = std::move(pre.target);
    art.coverage = std::move(pre.coverage);
    art.prices = std::move(pre.prices);
    art.selection = greedy_select(
        SelectionProblem{art.coverage, art.prices, art.target.cells.size(),
                         scenario.params.eta});

    std::vector<ParticipantLoad> loads = selected_loads(scenario, art.selection.chosen_ids);
    art.delays = any_positive(loads)
                     ? delay_report(loads, optimal_allocation(
                                               loads, scenario.params.total_bandwidth_hz))
                     : zero_report(loads);

    art.model_id = model_id_for_target(art.target);
    std::optional<double> hit_ratio;
    if (cache != nullptr) {
        if (!cache->lookup(art.model_id)) cache->admit(ModelEntry{art.model_id, 1, 1.0});
        const double total = static_cast<double>(cache->hits() + cache->misses());
        hit_ratio = static_cast<double>(cache->hits()) / total;
    }

    ResultRow row;
    row.experiment_id = experiment_id;
    row.scheme = "greedy+optimal+edge_partial";
    row.eta = scenario.params.eta;
    row.omega = scenario.params.omega;
    row.bandwidth_hz = scenario.params.total_bandwidth_hz;
    row.seed = scenario.params.seed;
    row.photo_count = art.selection.chosen_ids.size();
    row.total_cost = art.selection.total_cost;
    row.coverage_ratio = static_cast<double>(art.selection.coverage_count) /
                         static_cast<double>(art.target.cells.size());
    row.max_delay_s = art.delays.max_delay_s;
    row.hit_ratio = hit_ratio;
    art.row = row;
    return art;
}

std::vector<ResultRow> run_comparison(const Scenario& scenario,
                                      const std::vector<std::string>& selection_schemes,
                                      const std::vector<std::string>& allocation_schemes,
                                      const std::vector<std::string>& upload_schemes,
                                      const std::string& experiment_id) {
    scenario.validate();
    if (selection_schemes.empty() || allocation_schemes.empty() || upload_schemes.empty())
        throw DomainError("comparison: every scheme axis needs at least one entry");

    Prepared pre = prepare(scenario);
    const SelectionProblem problem = make_problem(pre, scenario.params.eta);
    const SelectionResult greedy = greedy_select(problem);
    const std::size_t budget = greedy.chosen_ids.size();
    const std::uint64_t seed = scenario.params.seed;

    // Baselines get greedy's photo budget; each stochastic scheme draws from
    // its own stream so enabling one never shifts another.
    std::vector<SelectionResult> selections;
    for (const std::string& name : selection_schemes) {
        if (name == "greedy") {
            selections.push_back(greedy);
        } else if (name == "rpss") {
            Rng rng = Rng(seed).child("rpss");
            selections.push_back(random_select(problem, budget, rng));
        } else if (name == "cpss") {
            Rng rng = Rng(seed).child("cpss");
            selections.push_back(cluster_select(pre.photos, problem, budget, rng));
        } else {
            throw UnknownScheme("selection scheme must be greedy, rpss or cpss, got \"" +
                                name + "\"");
        }
    }

    const std::vector<ParticipantLoad> loads_all = scenario.total_loads();
    const double bandwidth = scenario.params.total_bandwidth_hz;
    std::vector<ResultRow> rows;
    std::size_t row_index = 0;
    for (std::size_t si = 0; si < selection_schemes.size(); ++si) {
        const SelectionResult& sel = selections[si];
        const std::vector<ParticipantLoad> loads_sel =
            selected_loads(scenario, sel.chosen_ids);
        for (const std::string& alloc_name : allocation_schemes) {
            const AllocationScheme alloc = allocation_scheme_from_name(alloc_name);
            for (const std::string& up_name : upload_schemes) {
                const UploadScheme up = upload_scheme_from_name(up_name);
                const std::vector<ParticipantLoad>& loads =
                    up == UploadScheme::edge_total ? loads_all : loads_sel;

                DelayReport report;
                if (!any_positive(loads)) {
                    report = zero_report(loads);
                } else {
                    std::vector<double> shares;
                    switch (alloc) {
                        case AllocationScheme::optimal:
                            shares = optimal_allocation(loads, bandwidth);
                            break;
                        case AllocationScheme::fair:
                            shares = fair_allocation(loads, bandwidth);
                            break;
                        case AllocationScheme::weighted:
                            shares = weighted_allocation(loads, bandwidth);
                            break;
                        case AllocationScheme::random: {
                            Rng rng = Rng(seed).child("rras", row_index);
                            shares = random_allocation(loads, bandwidth, rng);
                            break;
                        }
                    }
                    report = delay_report(loads, shares);
                    if (up == UploadScheme::cloud_partial) {
                        if (!scenario.backhaul)
                            throw MissingBackhaul(
                                "comparison: cloud_partial needs a backhaul model");
                        double total_bits = 0.0;
                        for (const ParticipantLoad& l : loads)
                            total_bits += l.size_mb * kBitsPerMegabyte;
                        const double penalty = total_bits / scenario.backhaul->rate_bps +
                                               scenario.backhaul->wan_rtt_s;
                        report.max_delay_s = 0.0;
                        for (std::size_t i = 0; i < report.rows.size(); ++i) {
                            if (loads[i].size_mb > 0.0) report.rows[i].delay_s += penalty;
                            report.max_delay_s =
                                std::max(report.max_delay_s, report.rows[i].delay_s);
                        }
                    }
                }

                ResultRow row;
                row.experiment_id = experiment_id;
                row.scheme = selection_schemes[si] + "+" + alloc_name + "+" + up_name;
                row.eta = scenario.params.eta;
                row.omega = scenario.params.omega;
                row.bandwidth_hz = bandwidth;
                row.seed = seed;
                row.photo_count = sel.chosen_ids.size();
                row.total_cost = sel.total_cost;
                row.coverage_ratio = static_cast<double>(sel.coverage_count) /
                                     static_cast<double>(pre.target.cells.size());
                row.max_delay_s = report.max_delay_s;
                rows.push_back(std::move(row));
                ++row_index;
            }
        }
    }
    return rows;
}

OutputFormat format_from_name(std::string_view name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw DomainError("output format must be csv or json, got \"" + std::string(name) + "\"");
}

std::string format_float(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

constexpr const char* kResultHeader =
    "experiment_id,scheme,eta,omega,bandwidth_hz,seed,photo_count,total_cost,"
    "coverage_ratio,max_delay_s,hit_ratio";

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << kResultHeader << '\n';
    for (const ResultRow& r : rows) {
        out << r.experiment_id << ',' << r.scheme << ',' << format_float(r.eta) << ','
            << format_float(r.omega) << ',' << format_float(r.bandwidth_hz) << ',' << r.seed
            << ',' << r.photo_count << ',' << format_float(r.total_cost) << ','
            << format_float(r.coverage_ratio) << ',' << format_float(r.max_delay_s) << ',';
        if (r.hit_ratio) out << format_float(*r.hit_ratio);
        out << '\n';
    }
}

void emit_json(const std::vector<ResultRow>& rows, std::ostream& out) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ResultRow& r : rows) {
        nlohmann::ordered_json j;
        j["experiment_id"] = r.experiment_id;
        j["scheme"] = r.scheme;
        j["eta"] = r.eta;
        j["omega"] = r.omega;
        j["bandwidth_hz"] = r.bandwidth_hz;
        j["seed"] = r.seed;
        j["photo_count"] = r.photo_count;
        j["total_cost"] = r.total_cost;
        j["coverage_ratio"] = r.coverage_ratio;
        j["max_delay_s"] = r.max_delay_s;
        if (r.hit_ratio) j["hit_ratio"] = *r.hit_ratio;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

}  // namespace

void emit_results(const std::vector<ResultRow>& rows, OutputFormat format,
                  std::ostream& out) {
    if (format == OutputFormat::csv)
        emit_csv(rows, out);
    else
        emit_json(rows, out);
    if (!out) throw IoError("results: stream write failed");
}

void emit_results_file(const std::vector<ResultRow>& rows, OutputFormat format,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("results: cannot open " + path + " for writing");
    emit_results(rows, format, out);
}

SelectionProblem random_audit_instance(Rng& rng) {
    for (int attempt = 0; attempt < 128; ++attempt) {
        const std::size_t photos = 3 + static_cast<std::size_t>(rng.uniform_int(10));
        const std::size_t target = 8 + static_cast<std::size_t>(rng.uniform_int(33));
        double eta = rng.uniform01() < 0.25 ? 1.0 : rng.uniform(0.6, 1.0);

        SelectionProblem problem;
        problem.target_size = target;
        problem.eta = eta;
        std::vector<std::uint8_t> in_union(target, 0);
        std::vector<CellKey> pool(target);
        std::iota(pool.begin(), pool.end(), CellKey{0});
        for (std::size_t p = 0; p < photos; ++p) {
            const std::size_t span = 1 + static_cast<std::size_t>(
                                             rng.uniform_int(static_cast<std::uint64_t>(target)));
            for (std::size_t i = 0; i < span; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(
                                              static_cast<std::uint64_t>(target - i)));
                std::swap(pool[i], pool[j]);
            }
            CoverageSet set;
            set.photo_id = static_cast<std::int64_t>(p) + 1;
            set.cells.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(span));
            std::sort(set.cells.begin(), set.cells.end());
            for (CellKey c : set.cells) in_union[c] = 1;
            problem.coverage_sets.push_back(std::move(set));
            problem.prices.push_back(PriceTag{static_cast<std::int64_t>(p) + 1,
                                              rng.uniform_open_closed(0.0, 1.0)});
        }
        std::size_t union_size = 0;
        for (std::uint8_t b : in_union) union_size += b;
        if (union_size >= problem.required()) return problem;
    }
    throw Error("audit: failed to draw a feasible instance");
}

std::vector<AuditRecord> run_audit(std::size_t instances, std::uint64_t seed) {
    std::vector<AuditRecord> records(instances);
    const Rng root(seed);
    std::int64_t nn = static_cast<std::int64_t>(instances);
#pragma omp parallel for schedule(dynamic) if (instances > 4)
    for (std::int64_t i = 0; i < nn; ++i) {
        Rng rng = root.child("audit", static_cast<std::uint64_t>(i));
        const SelectionProblem problem = random_audit_instance(rng);
        const SelectionResult greedy = greedy_select(problem);
        const SelectionResult exact = exact_select(problem);
        const RatioReport ratio = audit_ratio(greedy, exact, problem.required());
        AuditRecord rec;
        rec.instance_id = static_cast<std::uint64_t>(i);
        rec.greedy_cost = ratio.greedy_cost;
        rec.exact_cost = ratio.exact_cost;
        rec.ratio = ratio.ratio;
        rec.bound = ratio.bound;
        rec.violation = ratio.violation;
        records[static_cast<std::size_t>(i)] = rec;
    }
    return records;
}

void emit_audit_json(const std::vector<AuditRecord>& records, std::ostream& out) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const AuditRecord& r : records) {
        nlohmann::ordered_json j;
        j["instance_id"] = r.instance_id;
        j["greedy_cost"] = r.greedy_cost;
        j["exact_cost"] = r.exact_cost;
        j["ratio"] = r.ratio;
        j["bound"] = r.bound;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
    if (!out) throw IoError("audit: stream write failed");
}

void ExperimentSpec::validate() const {
    if (!scenario_path && !generator)
        throw ValidationError("experiment: needs a scenario file or a generator spec");
    if (etas.empty()) throw ValidationError("experiment: empty eta sweep");
    for (double e : etas)
        if (!std::isfinite(e) || e <= 0.0 || e > 1.0)
            throw ValidationError("experiment: eta must lie in (0, 1], got " +
                                  std::to_string(e));
    if (schemes.empty()) throw ValidationError("experiment: empty scheme list");
}

SchemeCombo parse_scheme_label(const std::string& label) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto plus = label.find('+', start);
        parts.push_back(label.substr(start, plus - start));
        if (plus == std::string::npos) break;
        start = plus + 1;
    }
    if (parts.size() > 3)
        throw UnknownScheme("scheme label has too many parts: \"" + label + "\"");
    SchemeCombo combo;
    if (!parts.empty() && !parts[0].empty()) combo.selection = parts[0];
    if (parts.size() > 1 && !parts[1].empty()) combo.allocation = parts[1];
    if (parts.size() > 2 && !parts[2].empty()) combo.upload = parts[2];
    return combo;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const Scenario base = spec.scenario_path ? load_scenario(*spec.scenario_path)
                                             : generate_scene(*spec.generator, spec.seed);
    std::vector<ResultRow> rows;
    for (double eta : spec.etas) {
        Scenario scenario = base;
        scenario.params.eta = eta;
        for (const std::string& label : spec.schemes) {
            const SchemeCombo combo = parse_scheme_label(label);
            std::vector<ResultRow> part =
                run_comparison(scenario, {combo.selection}, {combo.allocation},
                               {combo.upload}, spec.experiment_id);
            rows.insert(rows.end(), part.begin(), part.end());
        }
    }
    return rows;
}

}  // namespace ecpcs
