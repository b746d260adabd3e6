#include "mintrace/cli.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mintrace/errors.hpp"
#include "mintrace/experiments.hpp"
#include "mintrace/io.hpp"

namespace mintrace {

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
    std::vector<int> values;
    std::string body = s;
    if (!body.empty() && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
    for (const auto& part : split_list(body)) {
        try {
            std::size_t used = 0;
            values.push_back(std::stoi(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad integer in --") + what + ": " + part);
        }
    }
    return values;
}

struct Flags {
    std::string config;
    std::string p, kinds, order, init;
    std::optional<int> n, reps, workers, din;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol, c0, alpha, gamma, kappa;
    std::optional<std::string> out, sigma, data;
    bool include_global = false;
    bool sample = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file; command-line flags override it");
    sub->add_option("--p", f.p, "Node count(s), comma separated");
    sub->add_option("--n", f.n, "Sample size");
    sub->add_option("--reps", f.reps, "Replications");
    sub->add_option("--seed", f.seed, "Base seed");
    sub->add_option("--kinds", f.kinds, "Neighborhoods: adj,rts,r2r_rev,r2r");
    sub->add_option("--workers", f.workers, "Worker threads");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--tol", f.tol, "Relative tie tolerance");
    sub->add_flag("--include-global", f.include_global, "Count global optima in the census");
    sub->add_option("--din", f.din, "In-degree cap");
    sub->add_option("--c0", f.c0);
    sub->add_option("--alpha", f.alpha);
    sub->add_option("--gamma", f.gamma);
    sub->add_option("--kappa", f.kappa);
    sub->add_option("--sigma", f.sigma, "Covariance CSV or model JSON");
    sub->add_option("--data", f.data, "Dataset CSV");
    sub->add_option("--order", f.order, "1-based ordering, e.g. 3,1,2");
    sub->add_option("--init", f.init, "1-based initial ordering");
    sub->add_flag("--sample", f.sample, "Finite-sample climb");
}

ExperimentConfig build_config(Command command, const Flags& f) {
    ExperimentConfig cfg;
    cfg.command = command;
    cfg.workers = default_workers();
    if (!f.config.empty()) apply_json(cfg, io::read_json_file(f.config));
    cfg.command = command;
    if (!f.p.empty()) cfg.p = parse_int_list(f.p, "p");
    if (f.n) cfg.n = *f.n;
    if (f.reps) {
        if (*f.reps < 1) throw ConfigError("reps must be positive");
        cfg.reps = *f.reps;
    }
    if (f.seed) cfg.seed = *f.seed;
    if (!f.kinds.empty()) {
        cfg.kinds.clear();
        for (const auto& k : split_list(f.kinds)) cfg.kinds.push_back(parse_kind(k));
    }
    if (f.workers) cfg.workers = *f.workers;
    if (f.out) cfg.out = *f.out;
    if (f.tol) cfg.census.rel_tol = *f.tol;
    if (f.include_global) cfg.census.include_global = true;
    if (f.din) cfg.score.d_in = *f.din;
    if (f.c0) cfg.score.c0 = *f.c0;
    if (f.alpha) cfg.score.alpha = *f.alpha;
    if (f.gamma) cfg.score.gamma = *f.gamma;
    if (f.kappa) cfg.score.kappa = *f.kappa;
    if (f.sigma) cfg.sigma_path = *f.sigma;
    if (f.data) cfg.data_path = *f.data;
    if (!f.order.empty()) cfg.order = parse_int_list(f.order, "order");
    if (!f.init.empty()) cfg.init = parse_int_list(f.init, "init");
    if (f.sample || !cfg.data_path.empty()) cfg.sample = true;
    cfg.validate();
    return cfg;
}

void run(const ExperimentConfig& cfg, std::ostream& out) {
    switch (cfg.command) {
        case Command::Census: {
            const auto table = run_census(cfg);
            out << io::census_summary_json(table).dump(2) << '\n';
            break;
        }
        case Command::Complexity:
            out << complexity_summary_json(run_complexity(cfg)).dump(2) << '\n';
            break;
        case Command::Check:
            out << check_report_json(run_check(cfg)).dump(2) << '\n';
            break;
        case Command::Climb:
            out << run_climb(cfg).dump(2) << '\n';
            break;
        case Command::Decompose:
            out << run_decompose(cfg).dump(2) << '\n';
            break;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minimum-trace DAG search and local-optima experiments"};
    app.require_subcommand(1);
    Flags flags;
    const Command commands[] = {Command::Census, Command::Complexity, Command::Climb, Command::Decompose,
                                Command::Check};
    std::vector<std::pair<CLI::App*, Command>> subs;
    for (auto c : commands) {
        auto* sub = app.add_subcommand(std::string(to_string(c)));
        add_common(sub, flags);
        subs.emplace_back(sub, c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        for (auto [sub, c] : subs) {
            if (sub->parsed()) run(build_config(c, flags), out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace mintrace
