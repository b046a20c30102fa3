#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "illposed/acceptance.hpp"
#include "illposed/bench.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Benchmark runner for discrete ill-posed inverse problems"};
    app.require_subcommand(1);

    std::string config_path, out_dir, csv_path, group = "method";
    std::size_t threads = 1;

    CLI::App* run = app.add_subcommand("run", "Run a configured experiment sweep");
    run->add_option("--config", config_path, "Path to the JSON experiment config")
        ->required();
    run->add_option("--out", out_dir, "Output directory (default: config's output field)");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));

    CLI::App* rates = app.add_subcommand("rates", "Fit convergence rates from a results CSV");
    rates->add_option("--csv", csv_path, "Path to a results CSV")->required();
    rates->add_option("--group", group, "Grouping column (method)");

    app.add_subcommand("selftest", "Run the fast acceptance checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            illposed::ExperimentConfig config;
            try {
                config = illposed::load_config(config_path);
            } catch (const illposed::ConfigError& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
            const std::string out = out_dir.empty() ? config.output : out_dir;
            std::vector<illposed::RunRecord> records;
            try {
                records = illposed::run_experiment(config, threads);
            } catch (const illposed::MethodError& e) {
                std::cerr << "method error: " << e.what() << "\n";
                return 3;
            }
            fs::create_directories(out);
            illposed::write_csv(records, out + "/results.csv");
            illposed::write_plot_data(records, out + "/plots", config.aggregate);
            std::cout << records.size() << " records -> " << out << "/results.csv\n";
            return 0;
        }

        if (rates->parsed()) {
            if (group != "method") {
                std::cerr << "config error: unsupported --group value: " << group << "\n";
                return 2;
            }
            const auto records = illposed::read_csv(csv_path);
            std::map<std::string, std::vector<illposed::RunRecord>> by_method;
            for (const auto& r : records) by_method[r.method].push_back(r);
            for (const auto& [method, recs] : by_method) {
                try {
                    const illposed::RateFit fit = illposed::fit_rate(recs);
                    std::cout << method << ": slope " << fit.slope << ", intercept "
                              << fit.intercept << ", fit residual " << fit.fit_residual
                              << "\n";
                } catch (const std::invalid_argument&) {
                    std::cout << method << ": too few distinct delta values for a fit\n";
                }
            }
            return 0;
        }

        // selftest
        return illposed::acceptance::run_selftest(std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
