#ifndef HCOPT_CONFIG_HPP
#define HCOPT_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "hcopt/model.hpp"

namespace hcopt {

// One structured-text document per problem. Line-oriented: '#' starts a
// comment, indentation is free, 'problem' and 'term' open sections, every
// other line is "key rest-of-line" within the current section. Expressions
// use the grammar in expression.hpp. The exact key set:
//
//   problem
//     dimension N
//     bound <i|all> <lo> <hi>        (inf / -inf allowed)
//     linear a1 .. aN <= rhs         (or >=)
//     objective <expr>
//     objective_lipschitz <value>    (optional hint)
//     objective_convex               (optional flag)
//     budget <value>
//     seed <value>                   (optional; CLI --seed overrides)
//     l0 <objective|constraint> w1 .. wN
//   term
//     role <objective|constraint>
//     flavor <open|closed>
//     multiplier <expr>
//     inner <expr>
//     multiplier_lipschitz <value>   (optional)
//     multiplier_convex              (optional)
//     inner_convex                   (optional)
struct ProblemConfig {
    ProblemSpec spec;
    std::uint64_t seed = 1;
    bool seed_set = false;
};

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(const std::string& msg, int line_no)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

ProblemConfig parse_problem_config(const std::string& text);
ProblemConfig load_problem_config(const std::string& path);

} // namespace hcopt

#endif
