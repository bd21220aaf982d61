// Command-line front end. Everything goes through the public C API in
// dbvn/dbvn.h; this translation unit never touches the core headers.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dbvn/dbvn.h"

namespace {

int report_error(dbvn_status st) {
    std::cerr << "error: " << dbvn_status_name(st) << ": " << dbvn_last_error() << '\n';
    return 1;
}

int write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open " << out_path << '\n';
        return 1;
    }
    out << text;
    return 0;
}

struct Overrides {
    std::string text;
    void add(const std::string& key, const std::string& value) {
        if (!value.empty()) text += key + " = " + value + "\n";
    }
};

int load_experiment(const std::string& config, const Overrides& ov, dbvn_experiment** ex) {
    dbvn_status st = dbvn_experiment_load(config.c_str(), ov.text.c_str(), ex);
    if (st != DBVN_OK) return report_error(st);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crossbar scheduling by doubly stochastic matrix decomposition, with "
                 "deflection-compensated simulation and closed-form analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dbvn_version()));

    // decompose
    std::string matrix_path, out_path;
    int frame = 0;
    double tol = 0.0;
    auto* cmd_decompose =
        app.add_subcommand("decompose", "Decompose a capacity matrix into weighted "
                                        "permutations, or build a frame schedule");
    cmd_decompose->add_option("matrix", matrix_path, "matrix file (first line n, then n rows)")
        ->required();
    cmd_decompose->add_option("--frame", frame, "emit a frame schedule of this many slots");
    cmd_decompose->add_option("--tol", tol, "residual tolerance (default 1e-10)");
    cmd_decompose->add_option("--out", out_path, "output path (default stdout)");

    // shared config-driven options
    std::string config_path, seed_str, slots_str, points_str;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd, bool with_points) {
        cmd->add_option("--config", config_path, "experiment config file")->required();
        cmd->add_option("--seed", seed_str, "override the base seed");
        cmd->add_option("--slots", slots_str, "override slots per run");
        if (with_points) cmd->add_option("--points", points_str, "override sweep points");
        cmd->add_option("--threads", threads, "worker threads (default: hardware)");
        cmd->add_option("--out", out_path, "output path (default stdout)");
    };

    auto* cmd_analyze = app.add_subcommand("analyze", "Closed-form analysis of the base point");
    add_common(cmd_analyze, false);

    auto* cmd_simulate =
        app.add_subcommand("simulate", "One simulation of the base point, as a CSV row");
    add_common(cmd_simulate, false);

    auto* cmd_sweep = app.add_subcommand("sweep", "Analysis-vs-simulation sweep, as CSV");
    add_common(cmd_sweep, true);

    double target = 0.0;
    auto* cmd_critical =
        app.add_subcommand("critical-k", "Smallest VOQ size reaching the loss target");
    add_common(cmd_critical, false);
    cmd_critical->add_option("--target", target, "loss target (default: config loss_target)");

    std::string csv_path;
    auto* cmd_compare = app.add_subcommand("compare", "Check simulation-vs-analysis bounds "
                                                      "on a sweep CSV");
    cmd_compare->add_option("csv", csv_path, "sweep CSV produced by `sweep`")->required();
    cmd_compare->add_option("--out", out_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (cmd_decompose->parsed()) {
        dbvn_matrix* m = nullptr;
        dbvn_status st = dbvn_matrix_read_file(matrix_path.c_str(), tol, &m);
        if (st != DBVN_OK) return report_error(st);
        dbvn_decomposition* d = nullptr;
        st = dbvn_decompose(m, tol, &d);
        dbvn_matrix_destroy(m);
        if (st != DBVN_OK) return report_error(st);

        char* text = nullptr;
        if (frame > 0) {
            dbvn_schedule* s = nullptr;
            st = dbvn_schedule_build(d, frame, &s);
            if (st == DBVN_OK) st = dbvn_schedule_to_text(s, &text);
            dbvn_schedule_destroy(s);
        } else {
            st = dbvn_decomposition_to_text(d, &text);
        }
        dbvn_decomposition_destroy(d);
        if (st != DBVN_OK) return report_error(st);
        int rc = write_output(text, out_path);
        dbvn_string_destroy(text);
        return rc;
    }

    Overrides ov;
    ov.add("seed", seed_str);
    ov.add("slots", slots_str);
    ov.add("points", points_str);

    if (cmd_analyze->parsed()) {
        dbvn_experiment* ex = nullptr;
        if (int rc = load_experiment(config_path, ov, &ex)) return rc;
        char* text = nullptr;
        dbvn_status st = dbvn_experiment_analyze(ex, &text);
        dbvn_experiment_destroy(ex);
        if (st != DBVN_OK) return report_error(st);
        int rc = write_output(text, out_path);
        dbvn_string_destroy(text);
        return rc;
    }

    if (cmd_simulate->parsed() || cmd_sweep->parsed()) {
        dbvn_experiment* ex = nullptr;
        if (int rc = load_experiment(config_path, ov, &ex)) return rc;
        char* csv = nullptr;
        dbvn_status st = cmd_sweep->parsed() ? dbvn_experiment_sweep_csv(ex, threads, &csv)
                                             : dbvn_experiment_single_csv(ex, threads, &csv);
        dbvn_experiment_destroy(ex);
        if (st != DBVN_OK) return report_error(st);
        int rc = write_output(csv, out_path);
        dbvn_string_destroy(csv);
        return rc;
    }

    if (cmd_critical->parsed()) {
        dbvn_experiment* ex = nullptr;
        if (int rc = load_experiment(config_path, ov, &ex)) return rc;
        int k = 0, monotone = 1;
        dbvn_status st = dbvn_experiment_critical_k(ex, target, threads, &k, &monotone);
        dbvn_experiment_destroy(ex);
        if (st != DBVN_OK) return report_error(st);
        std::ostringstream out;
        out << "critical_k = " << k << '\n';
        if (!monotone)
            out << "# warning: simulated loss was not monotone over the probed bracket\n";
        return write_output(out.str(), out_path);
    }

    if (cmd_compare->parsed()) {
        char* report = nullptr;
        int all_pass = 0, applicable = 0;
        dbvn_status st =
            dbvn_compare_csv_file(csv_path.c_str(), &report, &all_pass, &applicable);
        if (st != DBVN_OK) return report_error(st);
        int rc = write_output(report, out_path);
        dbvn_string_destroy(report);
        if (rc) return rc;
        return (applicable && !all_pass) ? 2 : 0;
    }

    return 0;
}
