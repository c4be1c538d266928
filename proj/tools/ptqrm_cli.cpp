// Command-line front end.  Every flag funnels through the same key=value
// channel as config files, so precedence is pure ordering: preset, then
// config files, then flags.

#include <ptqrm/ptqrm.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

struct Pending {
    std::string preset;
    std::vector<std::string> configs;
    std::vector<std::pair<std::string, std::string>> kv;
};

void add_kv(CLI::App* cmd, Pending& p, const std::string& flag, std::string key,
            const std::string& desc) {
    cmd->add_option_function<std::string>(
           flag, [&p, key = std::move(key)](const std::string& v) { p.kv.emplace_back(key, v); },
           desc)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void add_grid_flags(CLI::App* cmd, Pending& p) {
    add_kv(cmd, p, "--axis", "axis", "swept parameter: g, epsilon, or delta");
    add_kv(cmd, p, "--axis-start", "axis_start", "first grid value");
    add_kv(cmd, p, "--axis-stop", "axis_stop", "last grid value");
    add_kv(cmd, p, "--axis-count", "axis_count", "number of grid points");
}

void add_state_flags(CLI::App* cmd, Pending& p) {
    add_kv(cmd, p, "--tmax", "t_max", "evolution time");
    add_kv(cmd, p, "--dt", "dt", "integrator step");
    add_kv(cmd, p, "--stride", "record_stride", "record every this many steps");
    add_kv(cmd, p, "--state-n", "state_n", "initial photon number");
    add_kv(cmd, p, "--state-qubit", "state_qubit", "initial qubit state, + or -");
}

CLI::App* make_cmd(CLI::App& app, Pending& p, const char* name, const char* desc) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--preset", p.preset, "named parameter set (fig2a..fig2d, fig3a, fig3b, fig4, fig5)");
    cmd->add_option("--config", p.configs, "key=value config file, may repeat");
    add_kv(cmd, p, "--out", "out", "output path, - for stdout");
    add_kv(cmd, p, "--format", "format", "csv or json");
    add_kv(cmd, p, "--nmax", "n_max", "Fock truncation (highest kept photon number)");
    add_kv(cmd, p, "--workers", "workers", "worker threads for grid fan-out");
    add_kv(cmd, p, "--delta", "delta", "qubit splitting");
    add_kv(cmd, p, "--epsilon", "epsilon", "gain/loss rate");
    add_kv(cmd, p, "--omega", "omega", "field frequency");
    add_kv(cmd, p, "-g,--coupling", "g", "qubit-field coupling");
    add_kv(cmd, p, "--representation", "representation", "barez, rotatedx, or passivex");
    add_kv(cmd, p, "--im-tol", "im_tol", "imaginary-part threshold for phase classification");
    add_kv(cmd, p, "--eig-tol", "eig_tol", "eigensolver residual tolerance");
    return cmd;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for the PT-symmetric quantum Rabi model"};
    app.require_subcommand(1);
    app.footer("Set PTQRM_VERBOSE=1 for diagnostic chatter on stderr.");
    Pending p;

    auto* spectrum =
        make_cmd(app, p, "spectrum", "exact paired spectrum over a parameter grid");
    add_grid_flags(spectrum, p);
    add_kv(spectrum, p, "--pairs", "pairs", "number of level pairs to report");

    auto* aa = make_cmd(app, p, "aa", "adiabatic-approximation spectrum over a grid");
    add_grid_flags(aa, p);
    add_kv(aa, p, "--pairs", "pairs", "number of level pairs to report");

    auto* ep = make_cmd(app, p, "ep", "exceptional points: analytic seeds refined exactly");
    add_grid_flags(ep, p);
    add_kv(ep, p, "--pairs", "pairs", "number of level pairs to scan");
    add_kv(ep, p, "--bracket-pad", "bracket_pad", "half-width of the refinement bracket");
    add_kv(ep, p, "--gmax", "g_max", "coupling cutoff for seed scans");

    auto* juddian = make_cmd(app, p, "juddian", "crossing couplings of one level pair");
    add_kv(juddian, p, "--n", "pair", "pair index (Laguerre order)");
    add_kv(juddian, p, "--gmax", "g_max", "coupling cutoff");

    auto* dynamics = make_cmd(app, p, "dynamics", "Schrodinger evolution of a bare state");
    add_grid_flags(dynamics, p);
    add_state_flags(dynamics, p);
    add_kv(dynamics, p, "--state-index", "state_index", "start from this eigenstate instead");
    add_kv(dynamics, p, "--method", "method", "rk4 or eigenbasis");
    add_kv(dynamics, p, "--norm-guard", "norm_guard", "rescale threshold for growing norms");

    auto* lindblad = make_cmd(app, p, "lindblad", "three-level master equation cross-check");
    add_grid_flags(lindblad, p);
    add_state_flags(lindblad, p);
    add_kv(lindblad, p, "--jump", "jump", "quantum jump term, on or off");

    auto* converge = make_cmd(app, p, "converge", "spectral drift under truncation growth");
    add_kv(converge, p, "--nmax-list", "n_max_list", "comma list of truncations, increasing");
    add_kv(converge, p, "--levels", "levels", "number of low eigenvalues to track");

    (void)aa;
    (void)ep;
    (void)converge;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        ptqrm::cli::RunConfig cfg =
            p.preset.empty() ? ptqrm::cli::RunConfig{} : ptqrm::cli::preset_config(p.preset);
        for (const auto& f : p.configs) ptqrm::cli::apply_config_file(cfg, f);
        for (const auto& [k, v] : p.kv) ptqrm::cli::apply_key(cfg, k, v);
        ptqrm::cli::dispatch(name, cfg);
    } catch (const ptqrm::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const ptqrm::SearchError& e) {
        std::cerr << "search error: " << e.what() << '\n';
        return 4;
    } catch (const ptqrm::IntegratorError& e) {
        std::cerr << "integrator error: " << e.what() << '\n';
        return 5;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
