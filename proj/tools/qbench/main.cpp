// qbench — workload harness and calculators for the concurrent quantiles
// sketch. Subcommands: throughput, accuracy, stderr, holes, analyze.
// Exit codes: 0 success, 1 invalid configuration, 2 internal invariant
// violation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqs/analysis/error_model.hpp"
#include "cqs/analysis/holes.hpp"
#include "cqs/bench/workloads.hpp"
#include "cqs/core/types.hpp"

namespace {

using nlohmann::json;

struct OutputOptions {
    std::string path;       // empty: stdout
    std::string format = "csv";
};

std::ostream& open_sink(const OutputOptions& opt, std::ofstream& file) {
    if (opt.path.empty()) return std::cout;
    std::filesystem::path p(opt.path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("QBENCH_OUT_DIR")) p = std::filesystem::path(dir) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    file.open(p);
    if (!file) throw std::invalid_argument("cannot open output file: " + p.string());
    return file;
}

// One table: fixed header order, one row per record. JSON mirrors the CSV
// as an array of objects with the same keys.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void emit(std::ostream& os, const std::string& format) const {
        if (format == "json") {
            json arr = json::array();
            for (const auto& row : rows) {
                json obj;
                for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
                arr.push_back(obj);
            }
            os << arr.dump(2) << "\n";
            return;
        }
        for (std::size_t i = 0; i < header.size(); ++i)
            os << header[i] << (i + 1 < header.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void add_spec_flags(CLI::App* cmd, cqs::bench::WorkloadSpec& spec, std::string& dist,
                    std::string& mode, bool& no_pin) {
    cmd->add_option("--k", spec.k, "summary size (level capacity)");
    cmd->add_option("--b", spec.b, "thread-local buffer size; must divide 2k");
    cmd->add_option("--threads", spec.update_threads, "update threads (N)");
    cmd->add_option("--query-threads", spec.query_threads, "query threads");
    cmd->add_option("--numa-nodes", spec.nodes, "gather/sort units (S)");
    cmd->add_option("--rho", spec.rho, "query freshness threshold");
    cmd->add_option("--dist", dist, "uniform | normal");
    cmd->add_option("--seed", spec.seed, "RNG seed");
    cmd->add_option("--n", spec.stream_size, "stream size");
    cmd->add_option("--prefill", spec.prefill_size, "prefill size");
    cmd->add_option("--runs", spec.runs, "runs to average");
    cmd->add_option("--mode", mode, "update-only | query-only | mixed");
    cmd->add_flag("--no-pin", no_pin, "disable best-effort core pinning");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concurrent quantiles sketch benchmark harness"};
    app.require_subcommand(1);

    OutputOptions out;
    app.add_option("--out", out.path, "output file (default stdout; relative paths use $QBENCH_OUT_DIR)");
    app.add_option("--format", out.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    cqs::bench::WorkloadSpec spec;
    std::string dist = "uniform";
    std::string mode = "update-only";
    bool no_pin = false;

    auto* tput = app.add_subcommand("throughput", "timed workload runs");
    add_spec_flags(tput, spec, dist, mode, no_pin);

    auto* acc = app.add_subcommand("accuracy", "phi grid vs exact oracle");
    add_spec_flags(acc, spec, dist, mode, no_pin);

    auto* stde = app.add_subcommand("stderr", "per-phi standard error across seeded runs");
    add_spec_flags(stde, spec, dist, mode, no_pin);

    auto* holes = app.add_subcommand("holes", "hole model: simulation, bound, end-to-end");
    std::uint64_t trials = 100000;
    bool end_to_end = false;
    holes->add_option("--trials", trials, "Monte-Carlo trials");
    holes->add_flag("--end-to-end", end_to_end, "also measure an instrumented run");
    add_spec_flags(holes, spec, dist, mode, no_pin);

    auto* analyze = app.add_subcommand("analyze", "closed-form calculators");
    analyze->require_subcommand(1);
    cqs::analysis::RelaxationModel model;
    auto* relax = analyze->add_subcommand("relaxation", "r = 4kS + (N-S)b and the error model");
    relax->add_option("--k", model.k, "summary size");
    relax->add_option("--numa-nodes", model.nodes, "S");
    relax->add_option("--threads", model.threads, "N");
    relax->add_option("--b", model.b, "local buffer size");
    relax->add_option("--n", model.n, "stream size (enables epsilon output)");
    relax->add_option("--eps-c", model.epsilon_c, "sequential PAC epsilon");
    relax->add_option("--eps-prime", model.epsilon_prime, "staleness fraction (rho)");
    std::uint32_t hb_b = 16, hb_k = 4096;
    auto* hbound = analyze->add_subcommand("holes-bound", "closed-form hole bounds");
    hbound->add_option("--b", hb_b, "local buffer size");
    hbound->add_option("--k", hb_k, "summary size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        spec.dist = cqs::bench::dist_from_string(dist);
        spec.mode = cqs::bench::mode_from_string(mode);
        spec.pin_threads = !no_pin;

        std::ofstream file;
        Table table;

        if (*tput) {
            spec.validate();
            table.header = {"run",        "mode",        "k",       "b",
                            "threads",    "query_threads", "numa_nodes", "rho",
                            "dist",       "seed",        "n",       "prefill",
                            "elapsed_s",  "update_ops_per_s", "query_ops_per_s",
                            "query_count", "miss_rate",  "holes",   "batches"};
            for (const auto& r : cqs::bench::run_throughput(spec)) {
                table.rows.push_back({r.run, mode, std::to_string(spec.k),
                                      std::to_string(spec.b),
                                      std::to_string(spec.update_threads),
                                      std::to_string(spec.query_threads),
                                      std::to_string(spec.nodes), fmt(spec.rho), dist,
                                      std::to_string(spec.seed),
                                      std::to_string(spec.stream_size),
                                      std::to_string(spec.prefill_size), fmt(r.elapsed_s),
                                      fmt(r.update_ops_s), fmt(r.query_ops_s),
                                      std::to_string(r.queries), fmt(r.miss_rate),
                                      std::to_string(r.holes), std::to_string(r.batches)});
            }
        } else if (*acc) {
            table.header = {"phi", "estimate", "exact", "rank_error"};
            for (const auto& r :
                 cqs::bench::run_accuracy(spec, cqs::bench::default_phi_grid()))
                table.rows.push_back({fmt(r.phi), fmt(r.estimate), fmt(r.exact),
                                      fmt(r.rank_error)});
        } else if (*stde) {
            table.header = {"phi", "stderr"};
            for (const auto& r : cqs::bench::run_stderr(spec, spec.runs,
                                                        cqs::bench::default_phi_grid()))
                table.rows.push_back({fmt(r.phi), fmt(r.stderr_value)});
        } else if (*holes) {
            table.header = {"b",          "regions",          "simulated_mean",
                            "simulated_ci95", "closed_form_bound", "instrumented_mean"};
            auto r = cqs::bench::run_holes(spec, trials, end_to_end);
            table.rows.push_back({std::to_string(r.b), std::to_string(r.regions),
                                  fmt(r.simulated_mean), fmt(r.simulated_ci95),
                                  fmt(r.closed_form_bound), fmt(r.instrumented_mean)});
        } else if (*relax) {
            table.header = {"r", "epsilon_r", "epsilon_total"};
            const std::uint64_t r = cqs::analysis::relaxation(model);
            std::string er = "", et = "";
            if (model.n > 0) {
                er = fmt(cqs::analysis::epsilon_relaxed(model));
                et = fmt(cqs::analysis::epsilon_total(model));
            }
            table.rows.push_back({std::to_string(r), er, et});
            std::cerr << "r = " << r << "\n";
        } else if (*hbound) {
            table.header = {"b", "k", "eh_region_1", "eh_total_bound"};
            table.rows.push_back({std::to_string(hb_b), std::to_string(hb_k),
                                  fmt(cqs::analysis::eh_region_bound(1, hb_b)),
                                  fmt(cqs::analysis::eh_total_bound(hb_b, hb_k))});
        }

        table.emit(open_sink(out, file), out.format);
        return 0;
    } catch (const cqs::invariant_violation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
