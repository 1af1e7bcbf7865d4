#pragma once

// Problem-file ingestion: the JSON schema consumed by the CLI and test
// fixtures, its validation, canonical normalization, and assembly into
// phase/dirac objects.
//
// Schema (all polynomials use the shared expression grammar):
//   {
//     "variables":   ["z1", ...],               required, distinct names
//     "poisson":     {"i,j": "<poly>", ...},    required, 1-based, i < j
//     "constraints": ["<poly>", ...],           optional (default none)
//     "D":           [["<poly>", ...], ...],    optional M x M matrix
//     "hamiltonian": "<poly>",                  optional
//     "seed":        0,                         optional (default 0)
//     "points":      100,                       optional (default 100)
//     "tolerances":  {"casimir":..,"jacobi":..,"projector":..,
//                     "uniqueness":..,"kernel":..,"step":..},  optional
//     "relaxed":     false                      optional
//   }

#include "dirackit/dirac.hpp"
#include "dirackit/verify.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dirackit {

struct ProblemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemFile {
    std::vector<std::string> variables;
    // 0-based strict upper triangle; serialized 1-based as "i,j".
    std::map<std::pair<std::size_t, std::size_t>, std::string> poisson;
    std::vector<std::string> constraints;
    std::optional<std::vector<std::vector<std::string>>> d_entries;
    std::optional<std::string> hamiltonian;
    std::optional<unsigned> seed;
    std::optional<std::size_t> points;
    std::map<std::string, double> tolerances;
    bool relaxed = false;

    static ProblemFile from_json(const nlohmann::json& j);
    static ProblemFile load(const std::filesystem::path& path);
};

struct AssembledProblem {
    PoissonStructure j;
    ConstraintSet cons;
    std::optional<PolyMatrix> d_user;
    std::optional<PolyExpr> hamiltonian;
    unsigned seed = 0;
    std::size_t points = 100;
    Tolerances tols;
    bool relaxed = false;
    bool constraint_count_warning = false;
};

// Parses every polynomial and validates shapes. Throws ParseError or
// ProblemError with location detail.
AssembledProblem assemble(const ProblemFile& pf);

// Canonical problem JSON: polynomials reprinted in canonical form, zero
// Poisson entries dropped, defaults resolved. Feeding the result back
// through assemble() reproduces identical objects.
nlohmann::json normalized_json(const ProblemFile& pf, const AssembledProblem& ap);

struct SystemBuild {
    DiracSystem sys;
    bool user_d_rejected = false;       // user D present but failed verification
    std::string rejection;              // human-readable reason
    std::optional<std::pair<std::size_t, std::size_t>> rejection_entry;
    std::string rejection_poly;         // offending residual entry, canonical
};

// Chooses the D route: verified user D (symbolic pipeline), relaxed wrap
// when verification fails, pointwise pseudoinverse otherwise.
SystemBuild make_system(const AssembledProblem& ap);

BatteryOptions battery_options(const AssembledProblem& ap);

} // namespace dirackit
