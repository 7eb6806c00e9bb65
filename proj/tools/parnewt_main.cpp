#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>

#include "parnewt/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"parnewt: quasilinear parabolic solver, VMO_x oscillation lab and "
                 "perturbation-stability harness"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir;
    std::uint64_t seed_value = 0;
    bool seed_given = false;

    const char* commands[] = {"solve",      "newton-trace", "vmo",        "perturb-sweep",
                              "mms-verify", "convergence",  "check-hypotheses"};
    const char* descriptions[] = {
        "Newton solve; writes solution.csv and newton_trace.csv",
        "Newton solve; writes newton_trace.csv only",
        "oscillation moduli of the coefficients along the solution; writes vmo.csv",
        "perturbed solves over the epsilon list; writes stability.csv",
        "manufactured-solution verification; writes mms_report.csv",
        "refinement study; writes convergence.csv",
        "(H1)-(H4) status report; writes hypotheses.csv"};

    for (std::size_t i = 0; i < std::size(commands); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
        sub->add_option("--spec", spec_path, "problem-spec file")->required();
        sub->add_option("--out", out_dir, "output directory (default: [output] dir from the spec file)");
        sub->add_option("--seed", seed_value, "sampling seed (default: seed from the spec file)")
            ->each([&](const std::string&) { seed_given = true; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : parnewt::kSpecError;
    }

    parnewt::ProblemSpec spec;
    try {
        spec = parnewt::load_spec(spec_path);
    } catch (const parnewt::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return parnewt::kSpecError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const std::optional<std::uint64_t> seed =
        seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt;
    const int code = parnewt::run_subcommand(command, spec, out_dir, seed);
    if (code != parnewt::kOk)
        std::cerr << "parnewt " << command << ": exit " << code << " (see status.csv)\n";
    return code;
}
