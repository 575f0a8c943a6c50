#include "fssml/dataset.hpp"
#include "fssml/extraction.hpp"
#include "fssml/oracle.hpp"

namespace fssml::data {

Dataset build_dataset(const SweepSpec& spec, const BuildOptions& options) {
    Dataset d;
    d.sweep = spec;
    const std::vector<Geometry> xs = generate_sweep(spec);
    d.samples.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Sample smp;
        smp.id = i;
        smp.x = xs[i];
        smp.s = oracle_simulate(xs[i], spec);
        if (options.extract) {
            const em::Topology topo = geometry_topology(xs[i]);
            const em::CircuitParams init = resonance_init(smp.s, topo, options.init_asymmetry);
            const ExtractionResult fit = extract_circuit_params(smp.s, topo, spec.grid, init);
            smp.c = fit.c;
            smp.fit = {fit.residual, fit.mean_abs_error, fit.converged};
        } else {
            smp.c = nominal_circuit(xs[i], spec.oracle);
        }
        d.samples.push_back(std::move(smp));
    }
    return d;
}

}  // namespace fssml::data
