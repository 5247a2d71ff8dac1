// Command-line front end: check scenarios, time the distance kernels, and
// write the built-in fixtures out as scenario files.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "stratcheck/error.hpp"
#include "stratcheck/fixtures.hpp"
#include "stratcheck/generators.hpp"
#include "stratcheck/grassmann.hpp"
#include "stratcheck/scenario.hpp"

namespace {

using namespace stratcheck;

int write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return 2;
    }
    return 0;
}

struct CheckArgs {
    std::string scenario;
    std::string report;
    std::optional<std::size_t> shells, samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> r0, rho, eps_b, tol;
    bool timing = false;
    bool quiet = false;
};

int run_check(const CheckArgs& a) {
    Scenario sc;
    try {
        sc = load_scenario_file(a.scenario);
    } catch (const Error& e) {
        std::cerr << "error: " << a.scenario << ": " << e.what() << "\n";
        return 2;
    }
    Overrides ov{a.shells, a.samples, a.seed, a.r0, a.rho, a.eps_b, a.tol};
    const auto start = std::chrono::steady_clock::now();
    RunResult r = run_scenario(sc, ov);
    if (a.timing) {
        r.report["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    if (!a.quiet) {
        for (const auto& oc : r.outcomes) {
            std::string extra;
            if (oc.detail.contains("verdict")) extra = " (" + oc.detail["verdict"].get<std::string>() + ")";
            if (oc.detail.contains("error")) extra = ": " + oc.detail["error"].get<std::string>();
            std::cerr << to_string(oc.status) << "  " << oc.id << "  [" << oc.kind << "]" << extra << "\n";
        }
    }
    if (!a.report.empty()) {
        if (int rc = write_text(a.report, r.report.dump(2) + "\n")) return rc;
    }
    return r.exit_code;
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const std::size_t i = std::min(v.size() - 1, static_cast<std::size_t>(q * static_cast<double>(v.size())));
    return v[i];
}

int run_bench(std::uint64_t seed, std::size_t reps, std::size_t inputs) {
    std::printf("%-12s %4s %12s %12s\n", "kernel", "n", "median_us", "p90_us");
    for (std::size_t n : {3, 4, 8, 16}) {
        Rng rng(mix_seed(seed, n));
        std::vector<std::pair<Subspace, Subspace>> pairs;
        for (std::size_t i = 0; i < inputs; ++i) {
            const std::size_t k = 1 + rng.index(n - 1);
            const std::size_t l = 1 + rng.index(n - 1);
            pairs.emplace_back(random_subspace(n, k, rng), random_subspace(n, l, rng));
        }
        auto time = [&](const char* name, auto&& kernel) {
            std::vector<double> us;
            volatile double sink = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                for (const auto& [p, q] : pairs) {
                    const auto t0 = std::chrono::steady_clock::now();
                    sink = sink + kernel(p, q);
                    us.push_back(std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count());
                }
            }
            std::printf("%-12s %4zu %12.3f %12.3f\n", name, n, percentile(us, 0.5), percentile(us, 0.9));
        };
        time("dist_d", [](const Subspace& p, const Subspace& q) { return dist_d(p, q); });
        time("dist_delta", [](const Subspace& p, const Subspace& q) { return dist_delta(p, q); });
        time("lambda", [](const Subspace& p, const Subspace& q) { return lambda_angle(p, q); });
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampled regularity checks for stratified sets and maps"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "Run every check of a scenario file");
    check->add_option("scenario", ca.scenario, "Scenario file")->required();
    check->add_option("--report", ca.report, "Write the JSON report here ('-' for stdout)");
    check->add_option("--shells", ca.shells, "Number of shells")->check(CLI::PositiveNumber);
    check->add_option("--samples", ca.samples, "Samples per shell and stratum")->check(CLI::PositiveNumber);
    check->add_option("--seed", ca.seed, "Sampling seed");
    check->add_option("--r0", ca.r0, "Outer radius of the first shell")->check(CLI::PositiveNumber);
    check->add_option("--rho", ca.rho, "Shell ratio in (0, 1)")->check(CLI::Range(0.0, 1.0));
    check->add_option("--eps-b", ca.eps_b, "Whitney (B) defect ceiling")->check(CLI::NonNegativeNumber);
    check->add_option("--tol", ca.tol, "Tolerance for derivative, frontier and transversal checks")
        ->check(CLI::NonNegativeNumber);
    check->add_flag("--timing", ca.timing, "Add wall time to the report (breaks byte-identical reports)");
    check->add_flag("-q,--quiet", ca.quiet, "No per-check summary on stderr");

    std::uint64_t bench_seed = 1;
    std::size_t bench_reps = 20;
    std::size_t bench_inputs = 200;
    auto* bench = app.add_subcommand("bench", "Time dist_d, dist_delta and lambda on random subspaces");
    bench->add_option("--seed", bench_seed, "Input seed");
    bench->add_option("--reps", bench_reps, "Passes over the inputs")->check(CLI::PositiveNumber);
    bench->add_option("--inputs", bench_inputs, "Random pairs per dimension")->check(CLI::PositiveNumber);

    std::string fixture_name;
    std::string fixture_out;
    bool list = false;
    auto* emit = app.add_subcommand("emit-fixture", "Write a built-in fixture as a scenario file");
    emit->add_option("name", fixture_name, "Fixture name");
    emit->add_option("-o,--output", fixture_out, "Output file (default stdout)");
    emit->add_flag("--list", list, "List fixture names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*check) return run_check(ca);
    if (*bench) return run_bench(bench_seed, bench_reps, bench_inputs);
    if (*emit) {
        if (list) {
            for (const auto& n : fixture_names()) std::cout << n << "\n";
            return 0;
        }
        if (fixture_name.empty()) {
            std::cerr << "error: a fixture name is required (see --list)\n";
            return 2;
        }
        try {
            return write_text(fixture_out, fixture(fixture_name).scenario.dump(2) + "\n");
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return 2;
}
