#ifndef HCOPT_CLI_HPP
#define HCOPT_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hcopt/stationarity.hpp"

namespace hcopt {

// Everything a run needs; the seed fixes every stochastic element, so equal
// configs produce byte-identical report bodies.
struct RunConfig {
    std::string command;      // validate check multipliers lift approx-solve
                              // approx-suite bruteforce compare
    std::string problem_path; // unused by approx-suite
    std::string outdir = "out";
    std::uint64_t seed = 1;
    bool seed_from_cli = false;
    int threads = 1;
    bool assert_mode = false;

    std::vector<double> at_point;        // check / multipliers anchor
    std::string multiplier_mode = "necessary";
    std::string lambda_mode = "auto";    // "auto" or a numeric literal
    double safety = 1.5;
    std::string family = "modified-hinge";
    double delta0 = 0.5;
    double rho = 0.5;
    int stages = 24;
    int starts = 1;
    int grid_res = 128;
    int refine = 1;
    long branch_budget = 4096;
    Tolerances tol;
};

// Exit codes: 0 success, 2 validation/parse error, 3 numerical
// non-convergence, 4 certificate failure under --assert.
int run(const RunConfig& config);

int run_cli(int argc, const char* const* argv);

} // namespace hcopt

#endif
