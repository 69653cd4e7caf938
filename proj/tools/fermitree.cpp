// fermitree: batch driver for the verification suites, bound tables and
// scaling experiments. Reports go to stdout or to --out as JSON lines plus
// a CSV summary; exit status 0 means zero failures, 1 means a tolerance or
// domination violation, 2 a usage error.

#include <iostream>

#include "CLI11.hpp"
#include "fermitree/io.hpp"
#include "fermitree/suites.hpp"

namespace {

using fermitree::suites::RunConfig;

void write_report(const std::string& out, const std::string& format, const std::string& jsonl,
                  const std::string& csv) {
    namespace io = fermitree::io;
    if (out.empty()) {
        std::cout << (format == "csv" ? csv : jsonl);
        return;
    }
    std::vector<std::string> lines;
    std::istringstream is(jsonl);
    for (std::string line; std::getline(is, line);)
        if (!line.empty()) lines.push_back(line);
    io::append_lines(out + ".jsonl", lines);
    io::write_file(out + ".csv", csv);
}

int cmd_verify(const RunConfig& config, const std::string& out, const std::string& format) {
    int failures = 0;
    for (const auto& name : config.suites) {
        auto report = fermitree::suites::run_suite(name, config);
        failures += report.failures();
        write_report(out, format, report.jsonl(), report.csv());
        std::cerr << "suite " << name << ": " << report.rows.size() - report.failures() << "/"
                  << report.rows.size() << " cases passed\n";
    }
    return failures == 0 ? 0 : 1;
}

int cmd_bounds(const RunConfig& config, const std::string& out, const std::string& format) {
    namespace io = fermitree::io;
    auto rows = fermitree::suites::run_bound_table(config);
    std::ostringstream jsonl, csv;
    csv << io::bound_report_csv_header() << "\n";
    int violations = 0;
    for (const auto& row : rows) {
        jsonl << io::bound_report_json(row) << "\n";
        csv << io::bound_report_csv(row) << "\n";
        violations += !row.domination_ok;
    }
    write_report(out, format, jsonl.str(), csv.str());
    std::cerr << "bound table: " << rows.size() << " rows, " << violations
              << " domination failures\n";
    return violations == 0 ? 0 : 1;
}

int cmd_scaling(const RunConfig& config, const std::string& out, const std::string& format) {
    auto rep = fermitree::suites::run_scaling(config);
    std::ostringstream jsonl;
    jsonl << "{\"schema_version\":1"
          << ",\"sup_hat_slope\":" << rep.fit.sup_hat.value
          << ",\"sup_hat_stderr\":" << rep.fit.sup_hat.stderr
          << ",\"l1_hat_slope\":" << rep.fit.l1_hat.value
          << ",\"l1_hat_stderr\":" << rep.fit.l1_hat.stderr
          << ",\"l1_pos_slope\":" << rep.fit.l1_pos.value
          << ",\"frak_c_slope\":" << rep.fit.frak_c_slope.value
          << ",\"synthetic_sup_slope\":" << rep.synthetic_sup.value
          << ",\"synthetic_l1_slope\":" << rep.synthetic_l1.value << "}\n";
    write_report(out, format, jsonl.str(), rep.csv());
    std::cerr << "scaling: sup_hat slope " << rep.fit.sup_hat.value << ", l1_hat slope "
              << rep.fit.l1_hat.value << ", frak_c slope " << rep.fit.frak_c_slope.value << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fermitree: tree-expansion amplitude kernels and bounds"};
    app.require_subcommand(1);

    RunConfig config;
    config.threads = fermitree::suites::default_threads();
    std::string out, format = "json";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", config.seed, "random seed");
        cmd->add_option("--tol", config.tol, "tolerance")->check(CLI::PositiveNumber);
        cmd->add_option("--out", out, "output path prefix (.jsonl and .csv)");
        cmd->add_option("--format", format, "stdout format")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--suite", config.suites,
                       "suites: recursion, pfaffian, free-energy, gram, ibp, submult")
        ->required();
    verify->add_option("--m", config.m_max, "max tree size")->check(CLI::Range(1, 4));
    verify->add_option("--n-max", config.n_max, "max legs per vertex")->check(CLI::Range(2, 4));
    verify->add_option("--lattice", config.lattice, "1-D desk lattice length");
    verify->add_option("--configs", config.configs, "momentum configurations per instance");
    add_common(verify);

    auto* bounds_cmd = app.add_subcommand("bounds", "bound table over tree classes");
    bounds_cmd->add_option("--m", config.m_max, "max tree size")->check(CLI::Range(1, 4));
    bounds_cmd->add_option("--n-max", config.n_max, "max legs per vertex")->check(CLI::Range(2, 4));
    bounds_cmd->add_option("--branches", config.branches, "corollary branch count b");
    bounds_cmd->add_flag("--caterpillar", config.caterpillar, "include the theorem-2 caterpillar");
    add_common(bounds_cmd);

    auto* scaling = app.add_subcommand("scaling", "single-scale power counting");
    scaling->add_option("--M", config.M, "scale base M > 1")->check(CLI::Range(1.0001, 16.0));
    scaling->add_option("--j-min", config.j_min, "first scale");
    scaling->add_option("--j-max", config.j_max, "last scale");
    scaling->add_option("--d", config.d, "spatial dimension")->check(CLI::Range(1, 2));
    scaling->add_option("--lattice", config.scaling_points, "momentum points per axis");
    add_common(scaling);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (verify->parsed()) return cmd_verify(config, out, format);
        if (bounds_cmd->parsed()) return cmd_bounds(config, out, format);
        if (scaling->parsed()) return cmd_scaling(config, out, format);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
