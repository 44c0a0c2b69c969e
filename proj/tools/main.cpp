#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cvqt/errors.hpp"
#include "cvqt/experiment.hpp"

namespace {

struct Cli {
    cvqt::ExperimentSpec spec;
    std::string config;
    std::string out;
};

void add_common(CLI::App* cmd, Cli& cli) {
    auto& s = cli.spec;
    cmd->add_option("--zeta", s.zeta, "squeezing parameter of the TMSV family");
    cmd->add_option("--nbar", s.nbar, "mean thermal occupation of the resource modes");
    cmd->add_option("--bigN", s.big_n, "bath mean thermal number for dissipation");
    cmd->add_option("--s", s.s, "photons subtracted per mode");
    cmd->add_option("--transmittivity", s.transmittivity, "beam-splitter transmittivity");
    cmd->add_option("--ncut", s.cutoffs.n_c, "Fock cutoff n_c");
    cmd->add_option("--mcut", s.cutoffs.m_c, "Fock cutoff m_c");
    cmd->add_option("--kcut", s.cutoffs.k_c, "series cutoff k_c");
    cmd->add_option("--tau-points", s.tau_points, "tau grid points on [0, 2pi]");
    cmd->add_option("--zeta-points", s.zeta_points, "zeta grid points");
    cmd->add_option("--nbar-points", s.nbar_points, "nbar grid points");
    cmd->add_option("--gamma-t-points", s.gamma_t_points, "dissipation-time grid points");
    cmd->add_option("--zeta-max", s.zeta_max, "zeta grid upper edge");
    cmd->add_option("--nbar-max", s.nbar_max, "nbar grid upper edge");
    cmd->add_option("--gamma-t-max", s.gamma_t_max, "dissipation-time grid upper edge");
    cmd->add_option("--seed", s.seed, "random seed");
    cmd->add_option("--samples", s.sample_count, "random resources in the scan");
    cmd->add_option("--s-max", s.s_max, "deepest subtraction in the scan");
    cmd->add_option("--tolerance", s.oracle_tolerance, "oracle-check tolerance");
    cmd->add_option("--out", cli.out, "output path prefix (.csv / .svg)");
    cmd->add_flag("--svg", s.svg, "also emit an SVG rendering");
    cmd->add_flag("--unsigned-sn", s.unsigned_sn, "use S_n = +sqrt(1 - C_n^2) literally");
    for (auto* opt : cmd->get_options())
        if (opt->get_expected_min() > 0) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

// A JSON config supplies flag defaults; command-line flags win. The config
// values are injected as arguments right before the user's own flags.
std::vector<std::string> inject_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream is(path);
    if (!is) throw cvqt::ParameterError("cannot open config file " + path);
    nlohmann::json j;
    is >> j;
    std::vector<std::string> injected;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) injected.push_back("--" + it.key());
        } else {
            injected.push_back("--" + it.key() + "=" +
                               (it.value().is_string() ? it.value().get<std::string>()
                                                       : it.value().dump()));
        }
    }
    // keep the subcommand first, then config-derived flags, then user flags
    std::vector<std::string> out;
    std::size_t i = 0;
    if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
        out.push_back(args[0]);
        i = 1;
    }
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + i, args.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglement transfer from two-mode covariance matrices"};
    app.require_subcommand(1);
    Cli cli;

    const struct {
        const char* name;
        const char* help;
        cvqt::ExperimentKind kind;
    } kinds[] = {
        {"normalization-scan", "sum of diagonal gamma coefficients against zeta",
         cvqt::ExperimentKind::normalization_scan},
        {"transfer", "negativity of the two-qubit state against tau",
         cvqt::ExperimentKind::transfer},
        {"thermal-surface", "transferred negativity against (nbar, tau)",
         cvqt::ExperimentKind::thermal_surface},
        {"dissipation-surface", "transferred negativity against (Gamma t, tau)",
         cvqt::ExperimentKind::dissipation_surface},
        {"degauss-diff", "Gaussian minus photon-subtracted transfer over (zeta, tau)",
         cvqt::ExperimentKind::degauss_diff},
        {"random-max-scan", "max transfer of seeded random resources for s = 0..s_max",
         cvqt::ExperimentKind::random_max_scan},
        {"oracle-check", "dual-path validation against the Fock oracle",
         cvqt::ExperimentKind::oracle_check},
    };
    for (const auto& k : kinds) {
        CLI::App* cmd = app.add_subcommand(k.name, k.help);
        add_common(cmd, cli);
        cmd->callback([&cli, cmd, kind = k.kind] {
            cli.spec.kind = kind;
            // subtraction experiments default to one photon per mode
            if (kind == cvqt::ExperimentKind::degauss_diff && cmd->count("--s") == 0)
                cli.spec.s = 1;
        });
    }
    app.set_help_all_flag("--help-all", "print help for every subcommand");
    // --config is stripped before parsing; listed here so it shows in --help
    app.add_option("--config", cli.config, "JSON file with flag defaults")->expected(0, 1);

    std::vector<std::string> args;
    try {
        args = inject_config(argc, argv);
    } catch (const cvqt::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    cli.spec.out_prefix = cli.out;
    try {
        const cvqt::ResultTable table = cvqt::run(cli.spec);
        if (cli.spec.kind == cvqt::ExperimentKind::oracle_check) {
            bool all_pass = false;
            for (const auto& [k, v] : table.metadata) {
                if (k == "all_pass") all_pass = (v == "1");
                if (k.rfind("check_", 0) == 0) {
                    const std::size_t idx = std::stoul(k.substr(6));
                    const auto& row = table.rows.at(idx);
                    std::cout << (row[3] > 0.5 ? "PASS" : "FAIL") << "  " << v
                              << "  worst=" << row[1] << " tol=" << row[2] << "\n";
                }
            }
            std::cout << (all_pass ? "oracle-check: all checks passed\n"
                                   : "oracle-check: FAILURES present\n");
            if (!all_pass) return 4;
        } else {
            if (cli.out.empty()) {
                table.write_csv(std::cout);
            } else {
                std::cout << kind_name(cli.spec.kind) << ": wrote " << cli.out << ".csv ("
                          << table.rows.size() << " rows)\n";
            }
        }
        return 0;
    } catch (const cvqt::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const cvqt::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const cvqt::TruncationError& e) {
        std::cerr << "truncation error: " << e.what() << "\n";
        return 3;
    } catch (const cvqt::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
