// Microbenchmarks for the hot paths: polynomial products, exact and SVD
// pseudoinverses, pointwise reduced-bracket evaluation, and the
// finite-difference Jacobiator stencil.

#include "dirackit/dirac.hpp"
#include "dirackit/phase.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace dirackit;

namespace {

PoissonStructure example_structure() {
    const PhaseSpace space({"z1", "z2", "z3", "w1", "w2"});
    const std::map<std::pair<std::size_t, std::size_t>, std::string> upper = {
        {{0, 1}, "-z3"}, {{0, 2}, "z2"}, {{1, 2}, "-z1"}, {{3, 4}, "-1"}};
    return build_structure(space, upper);
}

PolyExpr random_poly(std::mt19937_64& eng, std::size_t nvars, unsigned deg, std::size_t terms) {
    PolyExpr p(nvars);
    for (std::size_t t = 0; t < terms; ++t) {
        ExpVec e(nvars, 0);
        unsigned budget = deg;
        for (std::size_t i = 0; i < nvars && budget; ++i) {
            const unsigned d = static_cast<unsigned>(eng() % (budget + 1));
            e[i] = d;
            budget -= d;
        }
        p.add_term(e, Rational(static_cast<long>(eng() % 19) - 9, 1 + eng() % 4));
    }
    return p;
}

void bm_poly_mul(benchmark::State& state) {
    std::mt19937_64 eng(1);
    const PolyExpr a = random_poly(eng, 5, 4, 12);
    const PolyExpr b = random_poly(eng, 5, 4, 12);
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(bm_poly_mul);

void bm_jacobiator_symbolic(benchmark::State& state) {
    const PoissonStructure j = example_structure();
    for (auto _ : state) benchmark::DoNotOptimize(jacobiator(j));
}
BENCHMARK(bm_jacobiator_symbolic);

void bm_pinv_exact(benchmark::State& state) {
    RationalMatrix c(3, 3);
    c.at(0, 1) = Rational(-3, 7);
    c.at(1, 0) = Rational(3, 7);
    c.at(0, 2) = Rational(2, 5);
    c.at(2, 0) = Rational(-2, 5);
    c.at(1, 2) = Rational(-1, 3);
    c.at(2, 1) = Rational(1, 3);
    for (auto _ : state) benchmark::DoNotOptimize(pseudo_inverse(c));
}
BENCHMARK(bm_pinv_exact);

void bm_jstar_pointwise_double(benchmark::State& state) {
    const PoissonStructure j = example_structure();
    const ConstraintSet cons = ConstraintSet::parse(j.space(), {"z1", "z2", "z3"});
    const DiracSystem sys = build_dirac_matrix(j, cons, solve_D_pointwise(j, cons));
    Eigen::VectorXd z(5);
    z << 1, 2, 3, 0.5, -0.25;
    for (auto _ : state) benchmark::DoNotOptimize(sys.jstar_at(z));
}
BENCHMARK(bm_jstar_pointwise_double);

void bm_jstar_pointwise_exact(benchmark::State& state) {
    const PoissonStructure j = example_structure();
    const ConstraintSet cons = ConstraintSet::parse(j.space(), {"z1", "z2", "z3"});
    const DiracSystem sys = build_dirac_matrix(j, cons, solve_D_pointwise(j, cons));
    const std::vector<Rational> z = {Rational(1), Rational(2), Rational(3), Rational(1, 2),
                                     Rational(-1, 4)};
    for (auto _ : state) benchmark::DoNotOptimize(sys.jstar_at_exact(z));
}
BENCHMARK(bm_jstar_pointwise_exact);

void bm_jacobiator_fd_exact(benchmark::State& state) {
    const PoissonStructure j = example_structure();
    const ConstraintSet cons = ConstraintSet::parse(j.space(), {"z1", "z2", "z3"});
    const DiracSystem sys = build_dirac_matrix(j, cons, solve_D_pointwise(j, cons));
    ExactMatrixField field = [&](std::span<const Rational> z) {
        return sys.jstar_at_exact(z);
    };
    const std::vector<Rational> z = {Rational(1), Rational(2), Rational(3), Rational(1, 2),
                                     Rational(-1, 4)};
    const Rational h(1, 100000);
    for (auto _ : state) benchmark::DoNotOptimize(jacobiator_fd_exact(field, 5, z, h));
}
BENCHMARK(bm_jacobiator_fd_exact);

} // namespace

BENCHMARK_MAIN();
