#ifndef ARCCONF_SYNTH_HPP
#define ARCCONF_SYNTH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "arcconf/dag.hpp"
#include "arcconf/dataset.hpp"
#include "arcconf/noisy_or.hpp"
#include "arcconf/search.hpp"

namespace arcconf {

// A fully specified discrete network: structure plus one conditional
// distribution table per node. CPT rows are indexed by the mixed-radix
// parent configuration (parents in sorted index order, the last parent
// varying fastest) and each row must sum to 1 within 1e-12.
struct CptNetwork {
    Dag dag;
    std::vector<int> arities;
    std::vector<std::string> names;
    std::vector<std::vector<double>> cpts;  // per node: q_count * arity, row-major by config

    CptNetwork(Dag dag, std::vector<int> arities, std::vector<std::string> names,
               std::vector<std::vector<double>> cpts);

    int nodes() const { return dag.nodes(); }
    std::uint64_t config_count(int node) const;
};

// Ancestral sampling in ordering order; rows draw from streams keyed by
// (seed, row), so generation is reproducible and order-independent.
Dataset sample_cpt_network(const CptNetwork& net, int n, std::uint64_t seed);

// Patient genotype sampler settings: each patient carries a number of
// distinct alleles drawn uniformly from [min_alleles, max_alleles], drawn
// without replacement from the allele frequency distribution.
struct GenotypeModel {
    int min_alleles = 3;
    int max_alleles = 6;
    std::vector<double> allele_freq;  // empty = uniform
};

// Bipartite noisy-OR model: cause (HLA) indicator nodes feeding binary
// effect (peptide) nodes. Arcs run only cause -> effect.
struct NoisyOrNetwork {
    int hla_count = 0;
    int peptide_count = 0;
    std::vector<NoisyOrParams> peptides;  // parents are HLA node indices
    GenotypeModel genotype;

    void validate() const;
    // Node layout: HLA indices [0, hla_count), peptides after. The ordering
    // is the identity, so causes precede effects.
    Dag dag() const;
    int nodes() const { return hla_count + peptide_count; }
};

Dataset sample_noisyor_network(const NoisyOrNetwork& net, int patients, std::uint64_t seed);

// Line-oriented network spec:
//   node <name> <arity>
//   parents <name> [<parent names...>]
//   cpt <name> <config-index> <p0 p1 ...>
//   order <names...>
// '#' starts a comment. Parse and validation errors carry line numbers and
// list every violation.
CptNetwork parse_network_spec(std::istream& in);
CptNetwork load_network_spec(const std::string& path);

// The bundled Alarm-style benchmark network (37 nodes, 46 arcs), compiled
// into the library.
const char* embedded_alarm_network_text();
CptNetwork alarm_network();

// Search restrictions for a bipartite model: children = peptides, candidate
// parents = HLA nodes, noisy-OR BIC scoring, no parent-set cap.
SearchConfig bipartite_noisyor_config(int hla_count, int peptide_count, double kappa);

// Random generating model of the stand-in's dimensions: per peptide a small
// random HLA parent set with moderately strong links.
NoisyOrNetwork random_noisyor_network(int hla_count, int peptide_count, std::uint64_t seed,
                                      GenotypeModel genotype = {});

// Stand-in construction: learn a bipartite structure from `data` with the
// given search config, then fit ML noisy-OR parameters to every learned
// peptide family. The result's structure equals the learned dag exactly.
NoisyOrNetwork build_hiv_standin_model(const Dataset& data, const SearchConfig& config,
                                       int hla_count, GenotypeModel genotype = {},
                                       int workers = 1);

// Full stand-in recipe at the published dimensions (70 HLA x 140 peptides,
// 102 patients): sample a seeded random network, sweep kappa to the point
// whose estimated FDR is closest to `target_fdr`, and rebuild from the
// structure learned there.
struct HivStandin {
    NoisyOrNetwork network;
    double kappa = 0.0;        // grid point used
    double fdr_at_kappa = 0.0;  // clamped estimate at that point
};
HivStandin make_hiv_standin(std::uint64_t seed, double target_fdr = 0.3, int workers = 1);

}  // namespace arcconf

#endif  // ARCCONF_SYNTH_HPP
