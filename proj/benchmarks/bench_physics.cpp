#include <benchmark/benchmark.h>

#include <vector>

#include "fssml/dataset.hpp"
#include "fssml/grad.hpp"
#include "fssml/oracle.hpp"
#include "fssml/training.hpp"

using namespace fssml;

namespace {

const data::Geometry kGeometry{14.825, 9.5, 14.8};

em::CircuitParams circuit() { return data::nominal_circuit(kGeometry, data::OracleConfig{}); }

data::Dataset small_dataset() {
    data::SweepSpec spec;
    spec.slot_length.n_levels = 4;
    spec.separation.n_levels = 4;
    spec.slot_length_2.n_levels = 4;
    return data::build_dataset(spec);
}

}  // namespace

static void BM_FPhys(benchmark::State& st) {
    const em::CircuitParams c = circuit();
    const em::Topology topo = data::geometry_topology(kGeometry);
    const em::FrequencyGrid grid = em::FrequencyGrid::standard();
    for (auto _ : st) benchmark::DoNotOptimize(em::f_phys(c, topo, grid));
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(grid.size()));
}

static void BM_FPhysDual(benchmark::State& st) {
    const em::CircuitParams c = circuit();
    const em::PhysicsPlan plan(data::geometry_topology(kGeometry), em::FrequencyGrid::standard());
    for (auto _ : st) benchmark::DoNotOptimize(grad::f_phys_dual(c, plan));
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(plan.grid().size()));
}

static void BM_LossGrad(benchmark::State& st) {
    const em::CircuitParams c = circuit();
    const em::PhysicsPlan plan(data::geometry_topology(kGeometry), em::FrequencyGrid::standard());
    std::vector<double> shifted(c.values().begin(), c.values().end());
    for (double& v : shifted) v *= 1.02;
    const em::SResponse target = em::f_phys(em::CircuitParams(shifted), plan.topology(), plan.grid());
    const auto kind = static_cast<grad::LossKind>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(grad::loss_grad_circuit(c, target, plan, kind));
}

// One full-batch end-to-end gradient over 64 samples.
static void BM_Phase2Objective(benchmark::State& st) {
    static const data::Dataset d = small_dataset();
    nn::TrainingConfig cfg;
    cfg.phase1.epochs = 50;
    const nn::PhaseResult p1 = nn::train_phase1(d.samples, {}, cfg);
    const nn::PhysicsBatch batch = nn::PhysicsBatch::build(d.samples, p1.model.norm.x);
    for (auto _ : st) benchmark::DoNotOptimize(nn::objective(p1.model, batch, nn::LossSelection::Eq5));
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(batch.size()));
}

BENCHMARK(BM_FPhys);
BENCHMARK(BM_FPhysDual);
BENCHMARK(BM_LossGrad)->Arg(static_cast<int>(grad::LossKind::S21Mae))->Arg(static_cast<int>(grad::LossKind::PhaseAware));
BENCHMARK(BM_Phase2Objective)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
