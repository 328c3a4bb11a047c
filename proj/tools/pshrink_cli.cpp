// pshrink: denoise signals, run risk simulations and compute shrink constants.
//
// Exit codes: 0 success, 1 I/O error, 2 validation error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pshrink/pshrink.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Accepts plain reals and ratios such as "4/3".
double parse_real(const std::string& text, const char* flag) {
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(text, &used);
            if (used == text.size() && std::isfinite(v)) return v;
        } else {
            const std::string num = text.substr(0, slash);
            const std::string den = text.substr(slash + 1);
            std::size_t used_den = 0;
            const double p = std::stod(num, &used);
            const double q = std::stod(den, &used_den);
            if (used == num.size() && used_den == den.size() && q != 0.0) return p / q;
        }
    } catch (const std::exception&) {
    }
    throw pshrink::ConfigError(std::string(flag) + ": cannot parse '" + text + "' as a number");
}

/// Accepts integers written as "1000000" or "1e6".
std::size_t parse_count(const std::string& text, const char* flag) {
    const double v = parse_real(text, flag);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
        throw pshrink::ConfigError(std::string(flag) + ": '" + text + "' is not a non-negative integer");
    return static_cast<std::size_t>(v);
}

pshrink::ARule parse_a_rule(const std::string& text) {
    using namespace pshrink::a_rule;
    if (text == "finite") return FiniteSample{};
    if (text == "asymptotic") return Asymptotic{};
    if (text == "eb") return EmpiricalBayes{};
    if (text == "domination") return DominationBound{};
    if (text.rfind("fixed:", 0) == 0) return Fixed{parse_real(text.substr(6), "--a-rule")};
    throw pshrink::ConfigError("--a-rule: expected finite|asymptotic|eb|domination|fixed:<real>, got '" + text + "'");
}

std::vector<double> read_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file '" + path + "'");
    return pshrink::csv::read_samples(in);
}

template <class Writer>
void write_output(const std::string& path, Writer&& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    writer(out);
    if (!out) throw IoError("failed writing '" + path + "'");
}

struct DenoiseArgs {
    std::string input;
    std::string method = "zh";
    std::string sigma = "1";
    std::string beta = "4/3";
    std::string a_rule = "finite";
    std::string out;
};

int run_denoise(const DenoiseArgs& args) {
    const pshrink::ShrinkConfig config{parse_real(args.beta, "--beta"), parse_a_rule(args.a_rule)};
    config.validate();
    const auto method = pshrink::parse_method(args.method, config);
    std::optional<double> sigma;
    if (args.sigma != "auto") {
        sigma = parse_real(args.sigma, "--sigma");
        if (!(*sigma > 0.0)) throw pshrink::ConfigError("--sigma must be positive or 'auto'");
    }

    const std::vector<double> y = read_input(args.input);
    const auto result = pshrink::denoise(y, method, sigma);

    const bool to_stdout = args.out.empty() || args.out == "-";
    if (result.sigma_estimated) {
        std::ostream& note = to_stdout ? std::cerr : std::cout;
        note << "estimated sigma: " << pshrink::csv::format_double(result.sigma) << '\n';
        if (result.sigma_degenerate)
            note << "warning: finest detail level has zero spread; output equals input\n";
    }
    write_output(args.out, [&](std::ostream& os) { pshrink::csv::write_samples(os, result.estimate); });
    return 0;
}

struct SimulateArgs {
    std::vector<std::string> methods{"zh"};
    std::vector<std::string> signals{"blocks"};
    std::vector<std::string> n_values{"1024"};
    std::string snr = "3";
    std::string reps = "500";
    std::uint64_t seed = 1;
    std::string sigma_mode = "known";
    unsigned threads = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& args) {
    std::vector<pshrink::LevelwiseMethod> methods;
    for (const auto& m : args.methods) methods.push_back(pshrink::parse_method(m));
    std::vector<std::size_t> ns;
    for (const auto& n : args.n_values) ns.push_back(parse_count(n, "--n"));
    for (const auto& s : args.signals)
        if (!pshrink::SignalRegistry::standard().contains(s))
            throw pshrink::ConfigError("unknown signal '" + s + "'");

    pshrink::SweepOptions options;
    options.snr = parse_real(args.snr, "--snr");
    options.reps = parse_count(args.reps, "--reps");
    options.seed = args.seed;
    options.threads = args.threads;
    if (args.sigma_mode == "known") options.sigma_mode = pshrink::SigmaMode::Known;
    else if (args.sigma_mode == "estimated") options.sigma_mode = pshrink::SigmaMode::Estimated;
    else throw pshrink::ConfigError("--sigma-mode: expected known|estimated");

    const auto sweep = pshrink::risk_sweep(methods, args.signals, ns, options);
    write_output(args.out, [&](std::ostream& os) { pshrink::csv::write_risk_table(os, sweep.reports); });
    return 0;
}

struct BoundArgs {
    std::string beta = "4/3";
    std::string d = "50";
    std::string reps = "100000";
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

int run_bound_a(const BoundArgs& args) {
    const double beta = parse_real(args.beta, "--beta");
    if (!(beta > 0.5 && beta <= 2.0)) throw pshrink::ConfigError("--beta must lie in (1/2, 2]");
    const std::size_t d = parse_count(args.d, "--d");
    const std::size_t reps = parse_count(args.reps, "--reps");
    const auto sim = pshrink::monte_carlo_a_beta(beta, d, reps, args.seed, args.threads);
    const double finite = pshrink::resolve_a({beta, pshrink::a_rule::FiniteSample{}}, d);
    const double limit = static_cast<double>(d) * pshrink::c_beta(beta);
    using pshrink::csv::format_double;
    std::cout << "beta,d,reps,a_beta,std_error,finite_sample_a,d_times_c_beta\n"
              << format_double(beta) << ',' << d << ',' << reps << ',' << format_double(sim.estimate) << ','
              << format_double(sim.std_error) << ',' << format_double(finite) << ',' << format_double(limit)
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thresholding shrinkage estimators and wavelet denoising"};
    app.require_subcommand(1);

    DenoiseArgs denoise;
    auto* cmd_denoise = app.add_subcommand("denoise", "Denoise a single-column CSV of 2^J samples");
    cmd_denoise->add_option("--input", denoise.input, "Input CSV")->required();
    cmd_denoise->add_option("--method", denoise.method, "zh|zh-sure|visu|sure|blockjs|js|identity");
    cmd_denoise->add_option("--sigma", denoise.sigma, "Noise sd, or 'auto' to estimate it");
    cmd_denoise->add_option("--beta", denoise.beta, "Exponent for zh (e.g. 4/3)");
    cmd_denoise->add_option("--a-rule", denoise.a_rule, "finite|asymptotic|eb|domination|fixed:<real>");
    cmd_denoise->add_option("--out", denoise.out, "Output CSV (default stdout)");

    SimulateArgs simulate;
    auto* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo risk table over methods, signals and n");
    cmd_simulate->add_option("--methods", simulate.methods, "Comma-separated method list")->delimiter(',');
    cmd_simulate->add_option("--signals", simulate.signals, "Comma-separated signal list")->delimiter(',');
    cmd_simulate->add_option("--n", simulate.n_values, "Comma-separated sample sizes")->delimiter(',');
    cmd_simulate->add_option("--snr", simulate.snr, "Signal-to-noise ratio");
    cmd_simulate->add_option("--reps", simulate.reps, "Replicates per cell");
    cmd_simulate->add_option("--seed", simulate.seed, "Random seed");
    cmd_simulate->add_option("--sigma-mode", simulate.sigma_mode, "known|estimated");
    cmd_simulate->add_option("--threads", simulate.threads, "Worker threads (0 = all cores)");
    cmd_simulate->add_option("--out", simulate.out, "Output CSV (default stdout)");

    BoundArgs bound;
    auto* cmd_bound = app.add_subcommand("bound-a", "Simulate the Bayes-risk bound a_beta");
    cmd_bound->add_option("--beta", bound.beta, "Exponent in (1/2, 2]");
    cmd_bound->add_option("--d", bound.d, "Dimension (>= 3)");
    cmd_bound->add_option("--reps", bound.reps, "Replicates (>= 1000)");
    cmd_bound->add_option("--seed", bound.seed, "Random seed");
    cmd_bound->add_option("--threads", bound.threads, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*cmd_denoise) return run_denoise(denoise);
        if (*cmd_simulate) return run_simulate(simulate);
        if (*cmd_bound) return run_bound_a(bound);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitValidation;
}
