// microbenchmarks for the paths the sweeps spend their time in: right-hand
// sides, integrator steps, noise draws, and the fast-subsystem diagram
#include <benchmark/benchmark.h>

#include "homeodyn/bifurcation.hpp"
#include "homeodyn/distributions.hpp"
#include "homeodyn/integrator.hpp"
#include "homeodyn/models.hpp"
#include "homeodyn/rng.hpp"

using namespace homeodyn;

static void bm_fhn_rhs(benchmark::State& state) {
    Fhn sys;
    Fhn::State x{0.5, 0.1}, d;
    for (auto _ : state) {
        sys.rhs(x, d);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(bm_fhn_rhs);

static void bm_ck_rhs(benchmark::State& state) {
    ChayKeizer sys;
    ChayKeizer::State x = sys.default_x0(), d;
    for (auto _ : state) {
        sys.rhs(x, d);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(bm_ck_rhs);

static void bm_pbm_rhs(benchmark::State& state) {
    Pbm sys;
    Pbm::State x = sys.default_x0(), d;
    for (auto _ : state) {
        sys.rhs(x, d);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(bm_pbm_rhs);

// stepping along the attractor keeps the state bounded, so the loop can run
// indefinitely without blowup checks
static void bm_fhn_step_euler(benchmark::State& state) {
    Fhn sys;
    Fhn::State x = sys.default_x0();
    for (auto _ : state) step_euler(sys, x, 1e-4);
    benchmark::DoNotOptimize(x);
}
BENCHMARK(bm_fhn_step_euler);

static void bm_fhn_step_rk4(benchmark::State& state) {
    Fhn sys;
    Fhn::State x = sys.default_x0();
    for (auto _ : state) step_rk4(sys, x, 1e-4);
    benchmark::DoNotOptimize(x);
}
BENCHMARK(bm_fhn_step_rk4);

static void bm_ck_step_rk4(benchmark::State& state) {
    ChayKeizer sys;
    ChayKeizer::State x = sys.default_x0();
    for (auto _ : state) step_rk4(sys, x, 0.05);
    benchmark::DoNotOptimize(x);
}
BENCHMARK(bm_ck_step_rk4);

static void bm_pbm_step_rk4(benchmark::State& state) {
    Pbm sys;
    Pbm::State x = sys.default_x0();
    for (auto _ : state) step_rk4(sys, x, 0.05);
    benchmark::DoNotOptimize(x);
}
BENCHMARK(bm_pbm_step_rk4);

static void bm_normal_draw(benchmark::State& state) {
    Rng rng(1);
    double acc = 0.0;
    for (auto _ : state) acc += sample_normal(0.0, 1.0, rng);
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(bm_normal_draw);

static void bm_folded_normal_draw(benchmark::State& state) {
    Rng rng(1);
    double acc = 0.0;
    for (auto _ : state) acc += sample_folded_normal(0.07, 0.04, rng);
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(bm_folded_normal_draw);

static void bm_fast_diagram(benchmark::State& state) {
    CkParams p;
    for (auto _ : state) {
        FastDiagram d = ck_fast_diagram(p);
        benchmark::DoNotOptimize(d.homoclinic_c);
    }
}
BENCHMARK(bm_fast_diagram)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
