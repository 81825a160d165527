#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "nwe/acceptance.hpp"
#include "nwe/analysis.hpp"
#include "nwe/errors.hpp"
#include "nwe/unambig.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitBadArgs = 2;
constexpr int kExitIo = 3;

bool in_open_unit(double s) {
    return s > 0.0 && s < 1.0;
}

int bad_args(const std::string& message) {
    std::cerr << "nwe_disc: " << message << '\n';
    return kExitBadArgs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocality-without-entanglement discrimination toolkit"};
    app.require_subcommand(1);

    double s = 0.5;
    std::string format = "text";
    auto* analyzeCmd = app.add_subcommand("analyze", "Run the full pipeline at one overlap");
    analyzeCmd->add_option("--s", s, "Overlap in (0, 1)");
    analyzeCmd->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

    double sMin = 0.1;
    double sMax = 0.9;
    std::size_t steps = 9;
    std::string outPath;
    auto* sweepCmd = app.add_subcommand("sweep", "Analyze a grid of overlaps and write CSV");
    sweepCmd->add_option("--s-min", sMin, "First grid point");
    sweepCmd->add_option("--s-max", sMax, "Last grid point");
    sweepCmd->add_option("--steps", steps, "Number of grid points");
    sweepCmd->add_option("--out", outPath, "Output CSV path (stdout when omitted)");

    std::string level = "fast";
    bool injectFault = false;
    auto* verifyCmd = app.add_subcommand("verify", "Run the acceptance suite");
    verifyCmd->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verifyCmd->add_flag("--inject-fault", injectFault, "Corrupt one Gram entry")->group("");

    double mcS = 0.5;
    std::size_t trials = 100000;
    std::uint64_t seed = 7;
    auto* mcCmd = app.add_subcommand("montecarlo", "Sample the two-round LOCC protocol");
    mcCmd->add_option("--s", mcS, "Overlap in (0, 1)");
    mcCmd->add_option("--trials", trials, "Number of trials");
    mcCmd->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArgs;
    }

    try {
        if (*analyzeCmd) {
            if (!in_open_unit(s)) {
                return bad_args("--s must lie in (0, 1)");
            }
            const nwe::AnalysisReport report = nwe::analyze(s);
            if (format == "json") {
                std::cout << nwe::to_json(report).dump(2) << '\n';
            } else {
                nwe::write_text(std::cout, report);
            }
            return kExitOk;
        }

        if (*sweepCmd) {
            if (!(sMin > 0.0 && sMin < sMax && sMax < 1.0)) {
                return bad_args("need 0 < --s-min < --s-max < 1");
            }
            if (steps < 2) {
                return bad_args("--steps must be at least 2");
            }
            const auto reports = nwe::sweep(sMin, sMax, steps);
            if (outPath.empty()) {
                nwe::write_sweep_csv(std::cout, reports);
                return kExitOk;
            }
            std::ofstream out(outPath, std::ios::binary);
            if (!out) {
                std::cerr << "nwe_disc: cannot open " << outPath << " for writing\n";
                return kExitIo;
            }
            nwe::write_sweep_csv(out, reports);
            out.close();
            if (!out) {
                std::cerr << "nwe_disc: failed writing " << outPath << '\n';
                return kExitIo;
            }
            return kExitOk;
        }

        if (*verifyCmd) {
            nwe::AcceptanceOptions options;
            options.level = level == "full" ? nwe::AcceptanceLevel::Full : nwe::AcceptanceLevel::Fast;
            options.injectSpectrumFault = injectFault;
            const auto results = nwe::run_acceptance(options);
            nwe::print_acceptance(std::cout, results);
            return nwe::all_passed(results) ? kExitOk : kExitVerifyFailed;
        }

        if (*mcCmd) {
            if (!in_open_unit(mcS)) {
                return bad_args("--s must lie in (0, 1)");
            }
            if (trials < 1) {
                return bad_args("--trials must be at least 1");
            }
            const nwe::ProtocolResult r = nwe::monte_carlo_protocol(mcS, trials, seed);
            nlohmann::ordered_json out;
            out["s"] = nwe::round_significant(mcS);
            out["trials"] = r.trials;
            out["seed"] = r.seed;
            out["exact"] = nwe::round_significant(r.exactSuccess);
            out["empirical"] = nwe::round_significant(*r.empiricalSuccess);
            out["stderr"] = nwe::round_significant(*r.standardError);
            out["wrong_conclusive_count"] = r.wrongConclusive;
            std::cout << out.dump(2) << '\n';
            return kExitOk;
        }
    } catch (const nwe::ValidationError& e) {
        return bad_args(e.what());
    } catch (const std::exception& e) {
        std::cerr << "nwe_disc: " << e.what() << '\n';
        return kExitVerifyFailed;
    }
    return kExitBadArgs;
}
