#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <nlohmann/json.hpp>

#include "coopreg/builtin.hpp"
#include "coopreg/scenario_io.hpp"
#include "coopreg/sim.hpp"
#include "coopreg/verify.hpp"

namespace {

using namespace coopreg;

Scenario load(const std::string& path, bool use_builtin) {
    if (use_builtin) {
        if (!path.empty())
            raise(Errc::invalid_scenario, "give either a scenario path or --builtin, not both");
        return builtin::scenario();
    }
    if (path.empty())
        raise(Errc::invalid_scenario, "a scenario path (or --builtin) is required");
    return scenario_io::load_scenario_file(path);
}

void print_matrix(std::ostream& os, const std::string& name, const Eigen::MatrixXd& m) {
    os << name << " =\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << "  [";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ", ";
            os << m(i, j);
        }
        os << "]\n";
    }
}

int cmd_check(const std::string& path, bool use_builtin) {
    const Scenario sc = load(path, use_builtin);
    const bool a1 = graph::check_assumption1(sc.graph);
    const bool a6 = graph::check_assumption6(sc.graph);
    const auto report = synthesis::check_assumptions(sc.subsystems, sc.exosystem);

    std::cout << "graph: " << sc.graph.n_followers() << " followers, "
              << sc.graph.n_informed() << " informed, "
              << controller_kind_name(sc.controller) << " controller, "
              << observer_kind_name(sc.observer) << " observer\n";
    std::cout << "assumption 1 (reachability from informed set): " << (a1 ? "pass" : "FAIL")
              << "\n";
    if (!a1) {
        // Name the unreachable nodes for the diagnostic.
        const auto& adj = sc.graph.adjacency();
        std::vector<bool> reached(sc.graph.n_followers(), false);
        std::vector<int> stack;
        for (int i = 0; i < sc.graph.n_informed(); ++i) {
            reached[i] = true;
            stack.push_back(i);
        }
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int w = 0; w < sc.graph.n_followers(); ++w)
                if (!reached[w] && adj(w, u) > 0.0) {
                    reached[w] = true;
                    stack.push_back(w);
                }
        }
        std::cout << "  unreachable followers:";
        for (int i = sc.graph.n_informed(); i < sc.graph.n_followers(); ++i)
            if (!reached[i]) std::cout << " " << i + 1;
        std::cout << "\n";
    }
    std::cout << "assumption 2 (no decaying exogenous modes): "
              << (report.a2 ? "pass" : "warn (decaying modes vanish on their own)") << "\n";
    std::cout << "assumption 3 (stabilizable pairs): " << (report.a3 ? "pass" : "FAIL");
    for (int idx : report.a3_failures) std::cout << " agent " << idx;
    std::cout << "\n";
    std::cout << "assumption 4 (detectable exogenous pair): " << (report.a4 ? "pass" : "FAIL")
              << "\n";
    std::cout << "assumption 5 (rank condition at exogenous modes): "
              << (report.a5 ? "pass" : "FAIL");
    for (int idx : report.a5_failures) std::cout << " agent " << idx;
    std::cout << "\n";
    const bool need_a6 = sc.observer == ObserverKind::output;
    std::cout << "assumption 6 (undirected uninformed subgraph): " << (a6 ? "pass" : "fail")
              << (need_a6 ? " (required by the output observer)" : " (not required)") << "\n";

    const bool ok = a1 && report.a3 && report.a4 && report.a5 && (!need_a6 || a6);
    std::cout << (ok ? "check passed" : "check FAILED") << "\n";
    return ok ? 0 : 1;
}

int cmd_synth(const std::string& path, bool use_builtin, const std::string& out_path) {
    const Scenario sc = load(path, use_builtin);
    if (sc.observer == ObserverKind::output && !graph::check_assumption6(sc.graph))
        raise(Errc::incompatible_kinds,
              "the output-based observer requires an undirected uninformed subgraph");
    const synthesis::GainSet gains = synthesis::synthesize(sc);

    if (gains.observer == ObserverKind::state) {
        print_matrix(std::cout, "p", gains.p);
        print_matrix(std::cout, "gamma", gains.gamma);
    } else {
        print_matrix(std::cout, "p_tilde", gains.p_tilde);
        print_matrix(std::cout, "j", gains.j);
    }
    print_matrix(std::cout, "l", gains.l);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot open '" + out_path + "' for writing");
    out << gains.to_json().dump(2) << "\n";
    if (!out) raise(Errc::io_error, "failed writing '" + out_path + "'");
    std::cout << "gains written to " << out_path << "\n";
    return 0;
}

int cmd_run(const std::string& path, bool use_builtin, const std::string& out_dir,
            std::optional<double> dt, std::optional<double> t_final,
            std::optional<std::uint64_t> seed, std::optional<int> record_every) {
    Scenario sc = load(path, use_builtin);
    if (dt) sc.integrator.dt = *dt;
    if (t_final) sc.integrator.t_final = *t_final;
    if (seed) sc.uncertainty.seed = *seed;
    if (record_every) sc.integrator.record_every = *record_every;
    sc.validate_shapes();

    const auto system = sim::assemble(sc);
    const auto trace = sim::integrate(system, sc.integrator.dt, sc.integrator.t_final,
                                      sc.integrator.record_every);
    const auto metrics = sim::compute_metrics(trace);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) raise(Errc::io_error, "cannot create output directory '" + out_dir + "'");

    const std::string trace_path = out_dir + "/trace.csv";
    const std::string metrics_path = out_dir + "/metrics.json";
    {
        std::ofstream out(trace_path, std::ios::binary);
        if (!out) raise(Errc::io_error, "cannot open '" + trace_path + "' for writing");
        sim::write_trace_csv(trace, out);
        if (!out) raise(Errc::io_error, "failed writing '" + trace_path + "'");
    }
    {
        std::ofstream out(metrics_path, std::ios::binary);
        if (!out) raise(Errc::io_error, "cannot open '" + metrics_path + "' for writing");
        out << sim::metrics_to_json(metrics, trace).dump(2) << "\n";
        if (!out) raise(Errc::io_error, "failed writing '" + metrics_path + "'");
    }

    std::cout << "final_output_norm = " << metrics.final_output_norm << ", settled_time = ";
    if (metrics.settled_time)
        std::cout << *metrics.settled_time;
    else
        std::cout << "never";
    std::cout << " (epsilon " << metrics.epsilon << "), trace " << trace_path << ", metrics "
              << metrics_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cooperative output regulation toolkit"};
    app.require_subcommand(1);

    std::string path;
    bool use_builtin = false;
    std::string synth_out = "gains.json";
    std::string run_out = ".";
    std::optional<double> dt, t_final;
    std::optional<std::uint64_t> seed;
    std::optional<int> record_every;

    auto* check = app.add_subcommand("check", "validate a scenario and its assumptions");
    check->add_option("path", path, "scenario file");
    check->add_flag("--builtin", use_builtin, "use the shipped regression scenario");

    auto* synth = app.add_subcommand("synth", "compute and certify gains");
    synth->add_option("path", path, "scenario file");
    synth->add_flag("--builtin", use_builtin, "use the shipped regression scenario");
    synth->add_option("-o,--out", synth_out, "gains JSON output path");

    auto* run = app.add_subcommand("run", "simulate the closed loop");
    run->add_option("path", path, "scenario file");
    run->add_flag("--builtin", use_builtin, "use the shipped regression scenario");
    run->add_option("-o,--out", run_out, "output directory");
    run->add_option("--dt", dt, "integration step override");
    run->add_option("--tfinal", t_final, "horizon override");
    run->add_option("--seed", seed, "uncertainty seed override");
    run->add_option("--record-every", record_every, "trace decimation override");

    auto* verify_cmd = app.add_subcommand("verify", "run the full regression battery");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(path, use_builtin);
        if (synth->parsed()) return cmd_synth(path, use_builtin, synth_out);
        if (run->parsed())
            return cmd_run(path, use_builtin, run_out, dt, t_final, seed, record_every);
        if (verify_cmd->parsed()) {
            const auto results = coopreg::verify::run_all();
            return coopreg::verify::print_report(std::cout, results);
        }
    } catch (const coopreg::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return err.exit_code();
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
