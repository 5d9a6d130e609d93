// Times the parallel coverage kernels against their serial references on a
// scaled-up scene and checks that both produce identical results. Not part
// of the test suite; build and run it when touching the kernels.

#include <chrono>
#include <cstdio>
#include <vector>

#include "ecpcs/coverage.hpp"
#include "ecpcs/parallel.hpp"
#include "ecpcs/scenario.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double best_of_ms(int repeats, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = Clock::now();
        fn();
        const auto stop = Clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(stop - start).count());
    }
    return best;
}

}  // namespace

int main() {
    ecpcs::GenerationSpec spec = ecpcs::GenerationSpec::temple_like();
    spec.grid_side = 48;
    spec.participant_count = 20;
    spec.photo_count = 400;
    spec.ring_radius_m = 22.0;
    const ecpcs::Scenario scenario = ecpcs::generate_scene(spec, 7);
    const std::vector<ecpcs::PhotoMeta> photos = scenario.all_photos();

    std::printf("threads: %d\n", ecpcs::max_threads());
    std::printf("scene: %zu photos, %d^3 cells\n", photos.size(), spec.grid_side);
    std::printf("%-18s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");

    ecpcs::SensingGrid grid_par = scenario.grid;
    ecpcs::SensingGrid grid_ser = scenario.grid;
    ecpcs::TargetArea target_par, target_ser;
    const double est_par = best_of_ms(3, [&] {
        grid_par.reset_coverage_counts();
        target_par = ecpcs::estimate_target_area(photos, grid_par,
                                                 scenario.params.target_threshold);
    });
    const double est_ser = best_of_ms(3, [&] {
        grid_ser.reset_coverage_counts();
        target_ser = ecpcs::serial::estimate_target_area(
            photos, grid_ser, scenario.params.target_threshold);
    });
    if (target_par.cells != target_ser.cells) {
        std::printf("MISMATCH: target areas differ\n");
        return 1;
    }
    std::printf("%-18s %12.2f %12.2f %8.2fx\n", "target_area", est_ser, est_par,
                est_ser / est_par);

    std::vector<ecpcs::CoverageSet> sets_par, sets_ser;
    const double cov_par = best_of_ms(
        3, [&] { sets_par = ecpcs::coverage_sets(photos, target_par, grid_par); });
    const double cov_ser = best_of_ms(3, [&] {
        sets_ser = ecpcs::serial::coverage_sets(photos, target_ser, grid_ser);
    });
    for (std::size_t i = 0; i < sets_par.size(); ++i) {
        if (sets_par[i].photo_id != sets_ser[i].photo_id ||
            sets_par[i].cells != sets_ser[i].cells) {
            std::printf("MISMATCH: coverage sets differ at photo %zu\n", i);
            return 1;
        }
    }
    std::printf("%-18s %12.2f %12.2f %8.2fx\n", "coverage_sets", cov_ser, cov_par,
                cov_ser / cov_par);
    std::printf("target cells: %zu, results identical\n", target_par.cells.size());
    return 0;
}
