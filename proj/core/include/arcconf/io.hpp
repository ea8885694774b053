#ifndef ARCCONF_IO_HPP
#define ARCCONF_IO_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arcconf/dag.hpp"
#include "arcconf/dataset.hpp"
#include "arcconf/scoring.hpp"

namespace arcconf {

// Dataset CSV: optional '#'-prefixed metadata lines, then a header row of
// variable names, then one row of string category labels per observation.
// Labels map to indices by sorted label order. Metadata written by the
// tools ("# labels <name> <lab...>", "# ordering <names...>") pins the
// label universe and ordering so files round-trip exactly; without it the
// universe is inferred from the data. Ragged rows, unseen labels, and
// single-label columns are hard errors.
struct LoadedDataset {
    Dataset data;
    std::vector<std::vector<std::string>> labels;  // per column, sorted (index order)
};

LoadedDataset read_dataset_csv(std::istream& in);
LoadedDataset read_dataset_csv_file(const std::string& path);

// `header_lines` are emitted first, each prefixed with "# ".
void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::vector<std::string>>& labels,
                       const std::vector<std::string>& header_lines);

// Default labels "0".."arity-1" for data generated in index space.
std::vector<std::vector<std::string>> index_labels(const Dataset& data);

// Model file: line-oriented text.
//   vars <N> / var <index> <name> / ordering <names...> /
//   arcs <M> / arc <parent-name> <child-name> / score <name> <value> /
//   total-score <value>
// Reloading yields an identical structure.
struct ModelFile {
    Dag dag;
    std::vector<std::string> names;
    std::vector<double> scores;  // per node; zero when absent
    double total_score = 0.0;
};

void write_model_file(std::ostream& out, const Dag& dag, const std::vector<std::string>& names,
                      const std::vector<FamilyScore>& scores, double total_score,
                      const std::vector<std::string>& header_lines);
ModelFile read_model_file(std::istream& in);
ModelFile read_model_file_from(const std::string& path);

// Maps a model file's node names onto a dataset's columns; the orderings
// must agree (a mismatch is an error, never reconciled silently).
Dag align_model_to_dataset(const ModelFile& model, const Dataset& data);

// Experiment spec: "key = value" lines, '#' comments. Unknown or missing
// keys are reported together.
struct ExperimentSpec {
    std::string method;   // fdr | bayes | both
    std::string network;  // alarm | hiv-standin | path
    std::vector<int> sizes;
    std::vector<double> kappas;
    double alpha = 4.0;
    std::string family = "bdeu";
    int replicates = 3;
    int q_permutations = 10;
    int size_limit = 5;
    std::vector<double> thresholds;
    std::uint64_t seed = 0;
    std::optional<int> max_parents;
    int max_model_arcs = 600;
    double bayes_kappa = 0.1;
    double bayes_alpha = 4.0;
};

ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec load_experiment_spec(const std::string& path);

// Shortest-round-trip decimal rendering used by every writer.
std::string format_double(double v);

}  // namespace arcconf

#endif  // ARCCONF_IO_HPP
