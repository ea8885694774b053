#include "arcconf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "arcconf/fdr.hpp"
#include "arcconf/parallel.hpp"

namespace arcconf {

namespace {

constexpr std::uint64_t kTagCptRow = 0x6370742d726f77ull;     // per-row cpt stream
constexpr std::uint64_t kTagGenotype = 0x67656e6f2d726full;   // per-row genotype stream
constexpr std::uint64_t kTagBaseModel = 0x626173652d6d6full;  // stand-in base model
constexpr std::uint64_t kTagBaseData = 0x626173652d6461ull;   // stand-in base data

}  // namespace

CptNetwork::CptNetwork(Dag dag_in, std::vector<int> arities_in, std::vector<std::string> names_in,
                       std::vector<std::vector<double>> cpts_in)
    : dag(std::move(dag_in)),
      arities(std::move(arities_in)),
      names(std::move(names_in)),
      cpts(std::move(cpts_in)) {
    std::vector<std::string> problems;
    const int n = dag.nodes();
    if (static_cast<int>(arities.size()) != n) problems.push_back("arities size mismatch");
    if (static_cast<int>(names.size()) != n) problems.push_back("names size mismatch");
    if (static_cast<int>(cpts.size()) != n) problems.push_back("cpt table count mismatch");
    for (int v = 0; v < n && problems.empty(); ++v) {
        if (arities[static_cast<std::size_t>(v)] < 2)
            problems.push_back("node " + names[static_cast<std::size_t>(v)] + " has arity < 2");
    }
    if (problems.empty()) {
        for (int v = 0; v < n; ++v) {
            const std::uint64_t q = config_count(v);
            const int r = arities[static_cast<std::size_t>(v)];
            const auto& table = cpts[static_cast<std::size_t>(v)];
            if (table.size() != q * static_cast<std::uint64_t>(r)) {
                problems.push_back("node " + names[static_cast<std::size_t>(v)] + " cpt has " +
                                   std::to_string(table.size()) + " values, expected " +
                                   std::to_string(q * static_cast<std::uint64_t>(r)));
                continue;
            }
            for (std::uint64_t j = 0; j < q; ++j) {
                double sum = 0.0;
                bool negative = false;
                for (int k = 0; k < r; ++k) {
                    const double p = table[j * static_cast<std::uint64_t>(r) + static_cast<std::uint64_t>(k)];
                    if (p < 0.0) negative = true;
                    sum += p;
                }
                if (negative)
                    problems.push_back("node " + names[static_cast<std::size_t>(v)] +
                                       " configuration " + std::to_string(j) +
                                       " has a negative probability");
                if (std::abs(sum - 1.0) > 1e-12)
                    problems.push_back("node " + names[static_cast<std::size_t>(v)] +
                                       " configuration " + std::to_string(j) + " sums to " +
                                       std::to_string(sum));
            }
        }
    }
    if (!problems.empty()) throw ValidationError("invalid cpt network", problems);
}

std::uint64_t CptNetwork::config_count(int node) const {
    std::uint64_t q = 1;
    for (int p : dag.parents(node)) q *= static_cast<std::uint64_t>(arities[static_cast<std::size_t>(p)]);
    return q;
}

Dataset sample_cpt_network(const CptNetwork& net, int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("sample_cpt_network: n must be >= 1");
    const int vars = net.nodes();
    std::vector<std::vector<int>> columns(static_cast<std::size_t>(vars),
                                          std::vector<int>(static_cast<std::size_t>(n)));
    std::vector<int> row(static_cast<std::size_t>(vars), 0);

    for (int k = 0; k < n; ++k) {
        RngStream rng({seed, kTagCptRow, static_cast<std::uint64_t>(k)});
        for (int node : net.dag.ordering()) {
            const auto& parents = net.dag.parents(node);
            std::uint64_t cfg = 0;
            for (int p : parents)
                cfg = cfg * static_cast<std::uint64_t>(net.arities[static_cast<std::size_t>(p)]) +
                      static_cast<std::uint64_t>(row[static_cast<std::size_t>(p)]);
            const int r = net.arities[static_cast<std::size_t>(node)];
            const double* dist =
                &net.cpts[static_cast<std::size_t>(node)][cfg * static_cast<std::uint64_t>(r)];
            const double u = rng.next_unit();
            double acc = 0.0;
            int value = r - 1;
            for (int v = 0; v < r; ++v) {
                acc += dist[v];
                if (u < acc) {
                    value = v;
                    break;
                }
            }
            row[static_cast<std::size_t>(node)] = value;
            columns[static_cast<std::size_t>(node)][static_cast<std::size_t>(k)] = value;
        }
    }

    std::vector<int> ordering = net.dag.ordering();
    return Dataset(std::move(columns), net.arities, net.names, std::move(ordering));
}

void NoisyOrNetwork::validate() const {
    std::vector<std::string> problems;
    if (hla_count < 1) problems.push_back("hla_count must be >= 1");
    if (peptide_count < 1) problems.push_back("peptide_count must be >= 1");
    if (static_cast<int>(peptides.size()) != peptide_count)
        problems.push_back("peptide params count mismatch");
    if (genotype.min_alleles < 1 || genotype.max_alleles < genotype.min_alleles)
        problems.push_back("invalid allele count range");
    if (genotype.max_alleles > hla_count)
        problems.push_back("cannot draw " + std::to_string(genotype.max_alleles) +
                           " distinct alleles from " + std::to_string(hla_count) + " types");
    if (!genotype.allele_freq.empty() &&
        static_cast<int>(genotype.allele_freq.size()) != hla_count)
        problems.push_back("allele frequency vector size mismatch");
    for (int j = 0; j < static_cast<int>(peptides.size()); ++j) {
        const auto& params = peptides[static_cast<std::size_t>(j)];
        try {
            params.validate();
        } catch (const ValidationError& e) {
            problems.push_back("peptide " + std::to_string(j) + ": " + e.what());
            continue;
        }
        for (int p : params.parents)
            if (p < 0 || p >= hla_count)
                problems.push_back("peptide " + std::to_string(j) + " links non-HLA node " +
                                   std::to_string(p));
    }
    if (!problems.empty()) throw ValidationError("invalid noisy-OR network", problems);
}

Dag NoisyOrNetwork::dag() const {
    const int n = nodes();
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
    for (int j = 0; j < peptide_count; ++j)
        parents[static_cast<std::size_t>(hla_count + j)] = peptides[static_cast<std::size_t>(j)].parents;
    std::vector<int> ordering(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ordering[static_cast<std::size_t>(i)] = i;
    return Dag(std::move(parents), std::move(ordering));
}

Dataset sample_noisyor_network(const NoisyOrNetwork& net, int patients, std::uint64_t seed) {
    net.validate();
    if (patients < 1) throw ValidationError("sample_noisyor_network: patients must be >= 1");

    const int vars = net.nodes();
    std::vector<std::vector<int>> columns(static_cast<std::size_t>(vars),
                                          std::vector<int>(static_cast<std::size_t>(patients), 0));

    std::vector<double> base_freq = net.genotype.allele_freq;
    if (base_freq.empty())
        base_freq.assign(static_cast<std::size_t>(net.hla_count), 1.0);

    for (int k = 0; k < patients; ++k) {
        RngStream rng({seed, kTagGenotype, static_cast<std::uint64_t>(k)});
        const int span = net.genotype.max_alleles - net.genotype.min_alleles + 1;
        const int count = net.genotype.min_alleles +
                          static_cast<int>(rng.next_below(static_cast<std::uint64_t>(span)));

        // Weighted draws without replacement.
        std::vector<double> weights = base_freq;
        for (int draw = 0; draw < count; ++draw) {
            const std::size_t idx = rng.next_weighted(weights);
            columns[idx][static_cast<std::size_t>(k)] = 1;
            weights[idx] = 0.0;
        }

        for (int j = 0; j < net.peptide_count; ++j) {
            const auto& params = net.peptides[static_cast<std::size_t>(j)];
            double survive = 1.0 - params.leak;
            for (std::size_t t = 0; t < params.parents.size(); ++t)
                if (columns[static_cast<std::size_t>(params.parents[t])][static_cast<std::size_t>(k)])
                    survive *= 1.0 - params.link[t];
            const double p_react = 1.0 - survive;
            columns[static_cast<std::size_t>(net.hla_count + j)][static_cast<std::size_t>(k)] =
                rng.next_unit() < p_react ? 1 : 0;
        }
    }

    std::vector<int> arities(static_cast<std::size_t>(vars), 2);
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(vars));
    for (int i = 0; i < net.hla_count; ++i) names.push_back("HLA" + std::to_string(i));
    for (int j = 0; j < net.peptide_count; ++j) names.push_back("PEP" + std::to_string(j));
    std::vector<int> ordering(static_cast<std::size_t>(vars));
    for (int i = 0; i < vars; ++i) ordering[static_cast<std::size_t>(i)] = i;
    return Dataset(std::move(columns), std::move(arities), std::move(names), std::move(ordering));
}

namespace {

struct SpecLine {
    int number = 0;
    std::vector<std::string> tokens;
};

std::vector<SpecLine> tokenize_spec(std::istream& in) {
    std::vector<SpecLine> lines;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        SpecLine line;
        line.number = number;
        std::string tok;
        while (ls >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

}  // namespace

CptNetwork parse_network_spec(std::istream& in) {
    std::vector<std::string> problems;
    auto fail = [&](int line, const std::string& msg) {
        problems.push_back("line " + std::to_string(line) + ": " + msg);
    };

    std::vector<std::string> names;
    std::vector<int> arities;
    std::map<std::string, int> index_of;
    std::map<int, std::vector<int>> parents_of;
    // cpt rows keyed (node, config) -> values
    std::map<std::pair<int, std::uint64_t>, std::vector<double>> cpt_rows;
    std::vector<std::string> order_names;
    bool saw_order = false;

    auto lookup = [&](const std::string& name, int line) -> int {
        auto it = index_of.find(name);
        if (it == index_of.end()) {
            fail(line, "unknown node '" + name + "'");
            return -1;
        }
        return it->second;
    };

    for (const auto& line : tokenize_spec(in)) {
        const auto& t = line.tokens;
        if (t[0] == "node") {
            if (t.size() != 3) {
                fail(line.number, "expected: node <name> <arity>");
                continue;
            }
            if (index_of.count(t[1])) {
                fail(line.number, "node '" + t[1] + "' declared twice");
                continue;
            }
            int arity = 0;
            try {
                arity = std::stoi(t[2]);
            } catch (...) {
                fail(line.number, "bad arity '" + t[2] + "'");
                continue;
            }
            index_of[t[1]] = static_cast<int>(names.size());
            names.push_back(t[1]);
            arities.push_back(arity);
        } else if (t[0] == "parents") {
            if (t.size() < 2) {
                fail(line.number, "expected: parents <name> [<parent names...>]");
                continue;
            }
            const int node = lookup(t[1], line.number);
            if (node < 0) continue;
            if (parents_of.count(node)) {
                fail(line.number, "parents of '" + t[1] + "' declared twice");
                continue;
            }
            std::vector<int> ps;
            for (std::size_t i = 2; i < t.size(); ++i) {
                const int p = lookup(t[i], line.number);
                if (p >= 0) ps.push_back(p);
            }
            parents_of[node] = std::move(ps);
        } else if (t[0] == "cpt") {
            if (t.size() < 4) {
                fail(line.number, "expected: cpt <name> <config-index> <p0 p1 ...>");
                continue;
            }
            const int node = lookup(t[1], line.number);
            if (node < 0) continue;
            std::uint64_t cfg = 0;
            try {
                cfg = std::stoull(t[2]);
            } catch (...) {
                fail(line.number, "bad config index '" + t[2] + "'");
                continue;
            }
            std::vector<double> values;
            bool ok = true;
            for (std::size_t i = 3; i < t.size(); ++i) {
                try {
                    values.push_back(std::stod(t[i]));
                } catch (...) {
                    fail(line.number, "bad probability '" + t[i] + "'");
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (cpt_rows.count({node, cfg})) {
                fail(line.number, "cpt row for '" + t[1] + "' configuration " + t[2] +
                                      " given twice");
                continue;
            }
            cpt_rows[{node, cfg}] = std::move(values);
        } else if (t[0] == "order") {
            if (saw_order) {
                fail(line.number, "order declared twice");
                continue;
            }
            saw_order = true;
            order_names.assign(t.begin() + 1, t.end());
        } else {
            fail(line.number, "unknown directive '" + t[0] + "'");
        }
    }

    if (names.empty()) problems.push_back("no nodes declared");
    if (!saw_order) problems.push_back("missing order line");
    if (!problems.empty()) throw ValidationError("invalid network spec", problems);

    const int n = static_cast<int>(names.size());
    std::vector<int> ordering;
    for (const auto& name : order_names) {
        auto it = index_of.find(name);
        if (it == index_of.end()) problems.push_back("order names unknown node '" + name + "'");
        else ordering.push_back(it->second);
    }
    auto ordering_problems = check_ordering(ordering, n);
    problems.insert(problems.end(), ordering_problems.begin(), ordering_problems.end());
    if (!problems.empty()) throw ValidationError("invalid network spec", problems);

    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
    for (auto& [node, ps] : parents_of) parents[static_cast<std::size_t>(node)] = ps;
    Dag dag(std::move(parents), std::move(ordering));

    std::vector<std::vector<double>> cpts(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        std::uint64_t q = 1;
        for (int p : dag.parents(v)) q *= static_cast<std::uint64_t>(arities[static_cast<std::size_t>(p)]);
        const int r = arities[static_cast<std::size_t>(v)];
        auto& table = cpts[static_cast<std::size_t>(v)];
        table.assign(q * static_cast<std::uint64_t>(r), -1.0);
        for (std::uint64_t j = 0; j < q; ++j) {
            auto it = cpt_rows.find({v, j});
            if (it == cpt_rows.end()) {
                problems.push_back("node " + names[static_cast<std::size_t>(v)] +
                                   ": missing cpt row for configuration " + std::to_string(j));
                continue;
            }
            if (static_cast<int>(it->second.size()) != r) {
                problems.push_back("node " + names[static_cast<std::size_t>(v)] +
                                   ": cpt row " + std::to_string(j) + " has " +
                                   std::to_string(it->second.size()) + " values, expected " +
                                   std::to_string(r));
                continue;
            }
            std::copy(it->second.begin(), it->second.end(),
                      table.begin() + static_cast<std::ptrdiff_t>(j * static_cast<std::uint64_t>(r)));
        }
        for (const auto& [key, row] : cpt_rows)
            if (key.first == v && key.second >= q)
                problems.push_back("node " + names[static_cast<std::size_t>(v)] +
                                   ": cpt configuration " + std::to_string(key.second) +
                                   " out of range (q = " + std::to_string(q) + ")");
    }
    if (!problems.empty()) throw ValidationError("invalid network spec", problems);

    return CptNetwork(std::move(dag), std::move(arities), std::move(names), std::move(cpts));
}

CptNetwork load_network_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open network spec '" + path + "'");
    try {
        return parse_network_spec(in);
    } catch (const ValidationError& e) {
        throw ValidationError("in '" + path + "': " + e.what());
    }
}

CptNetwork alarm_network() {
    std::istringstream in(embedded_alarm_network_text());
    return parse_network_spec(in);
}

SearchConfig bipartite_noisyor_config(int hla_count, int peptide_count, double kappa) {
    SearchConfig config;
    config.score.family = ScoreFamily::BicNoisyOr;
    config.score.kappa = kappa;
    std::vector<int> children(static_cast<std::size_t>(peptide_count));
    for (int j = 0; j < peptide_count; ++j) children[static_cast<std::size_t>(j)] = hla_count + j;
    std::vector<int> parents(static_cast<std::size_t>(hla_count));
    for (int i = 0; i < hla_count; ++i) parents[static_cast<std::size_t>(i)] = i;
    config.allowed_children = std::move(children);
    config.allowed_parents = std::move(parents);
    return config;
}

NoisyOrNetwork random_noisyor_network(int hla_count, int peptide_count, std::uint64_t seed,
                                      GenotypeModel genotype) {
    NoisyOrNetwork net;
    net.hla_count = hla_count;
    net.peptide_count = peptide_count;
    net.genotype = std::move(genotype);

    RngStream rng({seed, kTagBaseModel});
    const double parent_count_weights[] = {0.25, 0.40, 0.25, 0.10};  // 0..3 parents
    for (int j = 0; j < peptide_count; ++j) {
        NoisyOrParams params;
        const int n_parents =
            static_cast<int>(rng.next_weighted(std::span<const double>(parent_count_weights, 4)));
        std::vector<int> pool(static_cast<std::size_t>(hla_count));
        for (int i = 0; i < hla_count; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int d = 0; d < n_parents; ++d) {
            const std::size_t pick = static_cast<std::size_t>(rng.next_below(pool.size()));
            params.parents.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        std::sort(params.parents.begin(), params.parents.end());
        for (std::size_t t = 0; t < params.parents.size(); ++t)
            params.link.push_back(0.4 + 0.55 * rng.next_unit());
        params.leak = 0.01 + 0.04 * rng.next_unit();
        net.peptides.push_back(std::move(params));
    }
    net.validate();
    return net;
}

NoisyOrNetwork build_hiv_standin_model(const Dataset& data, const SearchConfig& config,
                                       int hla_count, GenotypeModel genotype, int workers) {
    if (hla_count < 1 || hla_count >= data.vars())
        throw ValidationError("build_hiv_standin_model: bad hla_count");

    StructureResult learned = learn_structure(data, config, workers);

    NoisyOrNetwork net;
    net.hla_count = hla_count;
    net.peptide_count = data.vars() - hla_count;
    net.genotype = std::move(genotype);
    net.peptides.resize(static_cast<std::size_t>(net.peptide_count));
    parallel_for(net.peptide_count, workers, [&](int j) {
        const int node = hla_count + j;
        const auto& parents = learned.dag.parents(node);
        net.peptides[static_cast<std::size_t>(j)] =
            fit_noisyor_ml(data, node, parents, config.score.noisyor_tol,
                           config.score.noisyor_max_iter)
                .params;
    });
    net.validate();
    return net;
}

HivStandin make_hiv_standin(std::uint64_t seed, double target_fdr, int workers) {
    const int hla = 70, peptides = 140, patients = 102;
    NoisyOrNetwork base = random_noisyor_network(hla, peptides, seed);
    Dataset data = sample_noisyor_network(base, patients, seed ^ kTagBaseData);

    const double grid[] = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
    SearchConfig config = bipartite_noisyor_config(hla, peptides, 1.0);
    auto sweep = fdr_sweep(data, config, grid, 10, seed, workers);

    double best_kappa = 0.0;
    double best_fdr = 0.0;
    double best_gap = -1.0;
    for (const auto& point : sweep) {
        if (!point.result || point.result->estimate.no_discoveries()) continue;
        const double fdr = *point.result->estimate.fdr_clamped;
        const double gap = std::abs(fdr - target_fdr);
        if (best_gap < 0.0 || gap < best_gap) {
            best_gap = gap;
            best_kappa = point.kappa;
            best_fdr = fdr;
        }
    }
    if (best_gap < 0.0)
        throw ValidationError("make_hiv_standin: no kappa in the grid produced discoveries");

    config.score.kappa = best_kappa;
    HivStandin out{build_hiv_standin_model(data, config, hla, {}, workers), best_kappa, best_fdr};
    return out;
}

}  // namespace arcconf
