// chemolab command-line front end.
//
//   chemolab simulate   --config scenario.json --out DIR
//   chemolab sweep      --config sweep.json    --out DIR [--parallel K]
//   chemolab thresholds --ndim N --p P --q Q --lambda L --chi X --alpha A
//                       --beta B --r R --mu M --eta E --lx LX --ly LY
//
// simulate/sweep write timeseries.csv, ledger.csv and summary.json (plus
// sweep.csv for sweeps); thresholds prints the evaluated report as JSON.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "chemolab/chemolab.hpp"

namespace {

chemolab::Json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw chemolab::IoError("cannot open config file " + path);
    try {
        return chemolab::Json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw chemolab::ConfigError(std::string("config parse error: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chemotaxis simulation laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int parallel = 0;

    auto* sim = app.add_subcommand("simulate", "run one scenario");
    sim->add_option("--config", config_path, "scenario JSON file")->required();
    sim->add_option("--out", out_dir, "output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("--config", config_path, "sweep JSON file")->required();
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--parallel", parallel, "worker threads (overrides config)");

    chemolab::ThresholdInputs ti;
    auto* thr = app.add_subcommand("thresholds", "evaluate the parameter thresholds");
    thr->add_option("--ndim", ti.n_dim, "dimension N (>= 2)");
    thr->add_option("--p", ti.p, "exponent p for mu1*");
    thr->add_option("--q", ti.q, "exponent q in (0,1)");
    thr->add_option("--lambda", ti.lambda, "sensitivity exponent in (0,1)");
    thr->add_option("--chi", ti.chi, "chemotactic coefficient");
    thr->add_option("--alpha", ti.alpha, "signal degradation rate");
    thr->add_option("--beta", ti.beta, "signal production rate");
    thr->add_option("--r", ti.r, "growth rate");
    thr->add_option("--mu", ti.mu, "self-limitation coefficient");
    thr->add_option("--eta", ti.eta, "persistence-floor parameter in (0,1]");
    thr->add_option("--lx", ti.lx, "domain length in x");
    thr->add_option("--ly", ti.ly, "domain length in y");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            auto cfg = chemolab::parse_scenario(load_json(config_path));
            auto res = chemolab::run_scenario(cfg, out_dir);
            std::cout << res.summary.dump(2) << "\n";
            return 0;
        }
        if (sweep->parsed()) {
            auto cfg = chemolab::parse_sweep(load_json(config_path));
            auto rows = chemolab::run_sweep(cfg, out_dir, parallel);
            std::cout << "sweep complete: " << rows.size() << " cells, results in "
                      << out_dir << "/sweep.csv\n";
            return 0;
        }
        chemolab::report_thresholds(ti, std::cout);
        return 0;
    } catch (const chemolab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const chemolab::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const chemolab::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
