#include "dirackit/problem.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dirackit {
namespace {

std::pair<std::size_t, std::size_t> parse_index_key(const std::string& key, std::size_t n) {
    std::size_t comma = key.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= key.size())
        throw ProblemError("poisson key '" + key + "' is not of the form \"i,j\"");
    std::size_t i = 0, j = 0;
    try {
        i = std::stoul(key.substr(0, comma));
        j = std::stoul(key.substr(comma + 1));
    } catch (const std::exception&) {
        throw ProblemError("poisson key '" + key + "' is not a pair of integers");
    }
    if (i < 1 || j < 1 || i > n || j > n)
        throw ProblemError("poisson key '" + key + "' indexes outside 1.." + std::to_string(n));
    if (i >= j)
        throw ProblemError("poisson key '" + key + "' must satisfy i < j (upper triangle)");
    return {i - 1, j - 1};
}

const std::vector<std::string> kToleranceKeys = {"casimir",   "jacobi", "kernel",
                                                 "projector", "step",   "uniqueness"};

} // namespace

ProblemFile ProblemFile::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ProblemError("problem file must be a JSON object");
    ProblemFile pf;

    if (!j.contains("variables") || !j["variables"].is_array() || j["variables"].empty())
        throw ProblemError("'variables' must be a non-empty array of names");
    for (const auto& v : j["variables"]) {
        if (!v.is_string()) throw ProblemError("'variables' entries must be strings");
        pf.variables.push_back(v.get<std::string>());
    }
    const std::size_t n = pf.variables.size();

    if (!j.contains("poisson") || !j["poisson"].is_object())
        throw ProblemError("'poisson' must be an object mapping \"i,j\" to polynomials");
    for (const auto& [key, val] : j["poisson"].items()) {
        if (!val.is_string()) throw ProblemError("poisson entry '" + key + "' must be a string");
        const auto ij = parse_index_key(key, n);
        if (!pf.poisson.emplace(ij, val.get<std::string>()).second)
            throw ProblemError("poisson entry '" + key + "' is duplicated");
    }

    if (j.contains("constraints")) {
        if (!j["constraints"].is_array())
            throw ProblemError("'constraints' must be an array of polynomials");
        for (const auto& c : j["constraints"]) {
            if (!c.is_string()) throw ProblemError("'constraints' entries must be strings");
            pf.constraints.push_back(c.get<std::string>());
        }
    }

    if (j.contains("D")) {
        if (!j["D"].is_array()) throw ProblemError("'D' must be an array of rows");
        std::vector<std::vector<std::string>> rows;
        for (const auto& row : j["D"]) {
            if (!row.is_array()) throw ProblemError("'D' rows must be arrays");
            std::vector<std::string> r;
            for (const auto& e : row) {
                if (!e.is_string()) throw ProblemError("'D' entries must be strings");
                r.push_back(e.get<std::string>());
            }
            rows.push_back(std::move(r));
        }
        const std::size_t m = pf.constraints.size();
        if (rows.size() != m)
            throw ProblemError("'D' must be " + std::to_string(m) + "x" + std::to_string(m) +
                               " to match the constraint count");
        for (const auto& r : rows)
            if (r.size() != m)
                throw ProblemError("'D' must be square of size " + std::to_string(m));
        pf.d_entries = std::move(rows);
    }

    if (j.contains("hamiltonian")) {
        if (!j["hamiltonian"].is_string()) throw ProblemError("'hamiltonian' must be a string");
        pf.hamiltonian = j["hamiltonian"].get<std::string>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
            throw ProblemError("'seed' must be a non-negative integer");
        pf.seed = j["seed"].get<unsigned>();
    }
    if (j.contains("points")) {
        if (!j["points"].is_number_integer() || j["points"].get<long long>() <= 0)
            throw ProblemError("'points' must be a positive integer");
        pf.points = j["points"].get<std::size_t>();
    }
    if (j.contains("tolerances")) {
        if (!j["tolerances"].is_object()) throw ProblemError("'tolerances' must be an object");
        for (const auto& [key, val] : j["tolerances"].items()) {
            if (std::find(kToleranceKeys.begin(), kToleranceKeys.end(), key) ==
                kToleranceKeys.end())
                throw ProblemError("unknown tolerance '" + key + "'");
            if (!val.is_number() || val.get<double>() <= 0)
                throw ProblemError("tolerance '" + key + "' must be a positive number");
            pf.tolerances[key] = val.get<double>();
        }
    }
    if (j.contains("relaxed")) {
        if (!j["relaxed"].is_boolean()) throw ProblemError("'relaxed' must be a boolean");
        pf.relaxed = j["relaxed"].get<bool>();
    }
    return pf;
}

ProblemFile ProblemFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ProblemError("JSON parse error in '" + path.string() + "': " + e.what());
    }
    return from_json(j);
}

AssembledProblem assemble(const ProblemFile& pf) {
    const PhaseSpace space(pf.variables);
    PoissonStructure j = build_structure(space, pf.poisson);
    ConstraintSet cons = ConstraintSet::parse(space, pf.constraints);

    AssembledProblem ap{std::move(j), std::move(cons), std::nullopt, std::nullopt,
                        0, 100, Tolerances{}, false, false};
    ap.relaxed = pf.relaxed;
    ap.seed = pf.seed.value_or(0);
    ap.points = pf.points.value_or(100);

    if (pf.d_entries) {
        const std::size_t m = ap.cons.count();
        PolyMatrix d(m, m, space.dim());
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < m; ++c) {
                try {
                    d.at(r, c) = parse_poly((*pf.d_entries)[r][c], space.var_names);
                } catch (const ParseError& e) {
                    throw ParseError(e.kind, e.offset,
                                     "D[" + std::to_string(r + 1) + "][" +
                                         std::to_string(c + 1) + "]: " + e.what());
                }
            }
        ap.d_user = std::move(d);
    }
    if (pf.hamiltonian) {
        try {
            ap.hamiltonian = parse_poly(*pf.hamiltonian, space.var_names);
        } catch (const ParseError& e) {
            throw ParseError(e.kind, e.offset, std::string("hamiltonian: ") + e.what());
        }
    }

    for (const auto& [key, val] : pf.tolerances) {
        if (key == "casimir") ap.tols.casimir = val;
        else if (key == "jacobi") ap.tols.jacobi = val;
        else if (key == "projector") ap.tols.projector = val;
        else if (key == "uniqueness") ap.tols.uniqueness = val;
        else if (key == "kernel") ap.tols.kernel = val;
        else if (key == "step") ap.tols.jacobi_step = val;
    }

    ap.constraint_count_warning =
        ap.cons.count() > 0 && constraint_count_excessive(ap.cons.count(), space.dim());
    return ap;
}

nlohmann::json normalized_json(const ProblemFile& pf, const AssembledProblem& ap) {
    nlohmann::json out;
    out["variables"] = pf.variables;

    nlohmann::json poisson = nlohmann::json::object();
    const auto& names = ap.j.space().var_names;
    for (std::size_t i = 0; i < ap.j.dim(); ++i)
        for (std::size_t k = i + 1; k < ap.j.dim(); ++k) {
            const PolyExpr& e = ap.j.matrix().at(i, k);
            if (e.is_zero()) continue;
            poisson[std::to_string(i + 1) + "," + std::to_string(k + 1)] = e.str(names);
        }
    out["poisson"] = poisson;

    if (!pf.constraints.empty()) {
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& phi : ap.cons.phis()) cs.push_back(phi.str(names));
        out["constraints"] = cs;
    }
    if (ap.d_user) {
        nlohmann::json d = nlohmann::json::array();
        for (std::size_t r = 0; r < ap.d_user->rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < ap.d_user->cols(); ++c)
                row.push_back(ap.d_user->at(r, c).str(names));
            d.push_back(row);
        }
        out["D"] = d;
    }
    if (ap.hamiltonian) out["hamiltonian"] = ap.hamiltonian->str(names);
    out["seed"] = ap.seed;
    out["points"] = ap.points;
    out["tolerances"] = {{"casimir", ap.tols.casimir},   {"jacobi", ap.tols.jacobi},
                         {"kernel", ap.tols.kernel},     {"projector", ap.tols.projector},
                         {"step", ap.tols.jacobi_step},  {"uniqueness", ap.tols.uniqueness}};
    if (ap.relaxed) out["relaxed"] = true;
    return out;
}

SystemBuild make_system(const AssembledProblem& ap) {
    if (ap.d_user) {
        try {
            DSolution d = verify_user_D(ap.j, ap.cons, *ap.d_user);
            return SystemBuild{build_dirac_matrix(ap.j, ap.cons, d), false, {}, {}, {}};
        } catch (const ResidualError& e) {
            SystemBuild out{build_dirac_matrix_relaxed(ap.j, ap.cons,
                                                       wrap_unverified_D(ap.j, ap.cons,
                                                                         *ap.d_user)),
                            true, e.what(), std::make_pair(e.row, e.col), e.entry};
            return out;
        }
        // AntisymmetryError propagates: a non-antisymmetric D is malformed
        // input, not a failed verification.
    }
    DSolution d = solve_D_pointwise(ap.j, ap.cons);
    return SystemBuild{build_dirac_matrix(ap.j, ap.cons, d), false, {}, {}, {}};
}

BatteryOptions battery_options(const AssembledProblem& ap) {
    BatteryOptions opts;
    opts.plan.seed = ap.seed;
    opts.plan.count = ap.points;
    opts.tols = ap.tols;
    return opts;
}

} // namespace dirackit
