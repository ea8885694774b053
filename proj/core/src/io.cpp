#include "arcconf/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "arcconf/version.hpp"

namespace arcconf {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

}  // namespace

LoadedDataset read_dataset_csv(std::istream& in) {
    std::vector<std::string> problems;
    std::map<std::string, std::vector<std::string>> declared_labels;
    std::vector<std::string> declared_ordering;

    std::string line;
    int line_no = 0;
    std::vector<std::string> names;
    bool have_header = false;
    std::vector<std::vector<std::string>> raw_columns;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto tokens = split_ws(line.substr(1));
            if (tokens.size() >= 2 && tokens[0] == "labels") {
                std::vector<std::string> labs(tokens.begin() + 2, tokens.end());
                declared_labels[tokens[1]] = std::move(labs);
            } else if (!tokens.empty() && tokens[0] == "ordering") {
                declared_ordering.assign(tokens.begin() + 1, tokens.end());
            }
            continue;
        }
        auto fields = split_csv_row(line);
        if (!have_header) {
            names = fields;
            have_header = true;
            raw_columns.resize(names.size());
            continue;
        }
        if (fields.size() != names.size()) {
            problems.push_back("line " + std::to_string(line_no) + ": row has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(names.size()));
            continue;
        }
        for (std::size_t c = 0; c < fields.size(); ++c)
            raw_columns[c].push_back(fields[c]);
    }
    if (!have_header) problems.push_back("missing header row");
    if (!problems.empty()) throw ValidationError("invalid dataset csv", problems);

    const int n_vars = static_cast<int>(names.size());
    std::vector<std::vector<std::string>> labels(static_cast<std::size_t>(n_vars));
    std::vector<std::vector<int>> columns(static_cast<std::size_t>(n_vars));
    for (int c = 0; c < n_vars; ++c) {
        auto it = declared_labels.find(names[static_cast<std::size_t>(c)]);
        std::vector<std::string> universe;
        if (it != declared_labels.end()) {
            universe = it->second;
        } else {
            std::set<std::string> seen(raw_columns[static_cast<std::size_t>(c)].begin(),
                                       raw_columns[static_cast<std::size_t>(c)].end());
            universe.assign(seen.begin(), seen.end());
        }
        // Mapping rule: index = rank in sorted label order.
        std::sort(universe.begin(), universe.end());
        universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
        if (universe.size() < 2)
            problems.push_back("column '" + names[static_cast<std::size_t>(c)] +
                               "' has fewer than 2 category labels");
        std::map<std::string, int> to_index;
        for (std::size_t i = 0; i < universe.size(); ++i)
            to_index[universe[i]] = static_cast<int>(i);
        auto& col = columns[static_cast<std::size_t>(c)];
        col.reserve(raw_columns[static_cast<std::size_t>(c)].size());
        for (std::size_t r = 0; r < raw_columns[static_cast<std::size_t>(c)].size(); ++r) {
            const auto& v = raw_columns[static_cast<std::size_t>(c)][r];
            auto f = to_index.find(v);
            if (f == to_index.end()) {
                problems.push_back("row " + std::to_string(r) + ", column '" +
                                   names[static_cast<std::size_t>(c)] + "': label '" + v +
                                   "' is not in the declared label set");
                col.push_back(0);
            } else {
                col.push_back(f->second);
            }
        }
        labels[static_cast<std::size_t>(c)] = std::move(universe);
    }
    if (!problems.empty()) throw ValidationError("invalid dataset csv", problems);

    std::vector<int> ordering;
    if (!declared_ordering.empty()) {
        std::map<std::string, int> name_index;
        for (int c = 0; c < n_vars; ++c) name_index[names[static_cast<std::size_t>(c)]] = c;
        for (const auto& nm : declared_ordering) {
            auto f = name_index.find(nm);
            if (f == name_index.end())
                problems.push_back("ordering names unknown column '" + nm + "'");
            else
                ordering.push_back(f->second);
        }
        if (!problems.empty()) throw ValidationError("invalid dataset csv", problems);
    } else {
        ordering.resize(static_cast<std::size_t>(n_vars));
        for (int c = 0; c < n_vars; ++c) ordering[static_cast<std::size_t>(c)] = c;
    }

    std::vector<int> arities(static_cast<std::size_t>(n_vars));
    for (int c = 0; c < n_vars; ++c)
        arities[static_cast<std::size_t>(c)] = static_cast<int>(labels[static_cast<std::size_t>(c)].size());

    return LoadedDataset{Dataset(std::move(columns), std::move(arities), names, std::move(ordering)),
                         std::move(labels)};
}

LoadedDataset read_dataset_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset '" + path + "'");
    try {
        return read_dataset_csv(in);
    } catch (const ValidationError& e) {
        throw ValidationError("in '" + path + "': " + e.what());
    }
}

std::vector<std::vector<std::string>> index_labels(const Dataset& data) {
    std::vector<std::vector<std::string>> labels(static_cast<std::size_t>(data.vars()));
    for (int c = 0; c < data.vars(); ++c)
        for (int v = 0; v < data.arity(c); ++v)
            labels[static_cast<std::size_t>(c)].push_back(std::to_string(v));
    return labels;
}

void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::vector<std::string>>& labels,
                       const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << "\n";
    out << "# ordering";
    for (int v : data.ordering()) out << ' ' << data.name(v);
    out << "\n";
    for (int c = 0; c < data.vars(); ++c) {
        out << "# labels " << data.name(c);
        for (const auto& lab : labels[static_cast<std::size_t>(c)]) out << ' ' << lab;
        out << "\n";
    }
    for (int c = 0; c < data.vars(); ++c) out << (c ? "," : "") << data.name(c);
    out << "\n";
    for (int r = 0; r < data.rows(); ++r) {
        for (int c = 0; c < data.vars(); ++c)
            out << (c ? "," : "")
                << labels[static_cast<std::size_t>(c)][static_cast<std::size_t>(data.value(r, c))];
        out << "\n";
    }
}

void write_model_file(std::ostream& out, const Dag& dag, const std::vector<std::string>& names,
                      const std::vector<FamilyScore>& scores, double total_score,
                      const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out << "# " << h << "\n";
    out << "vars " << dag.nodes() << "\n";
    for (int v = 0; v < dag.nodes(); ++v) out << "var " << v << ' ' << names[static_cast<std::size_t>(v)] << "\n";
    out << "ordering";
    for (int v : dag.ordering()) out << ' ' << names[static_cast<std::size_t>(v)];
    out << "\n";
    out << "arcs " << dag.arc_count() << "\n";
    for (int child = 0; child < dag.nodes(); ++child)
        for (int p : dag.parents(child))
            out << "arc " << names[static_cast<std::size_t>(p)] << ' ' << names[static_cast<std::size_t>(child)] << "\n";
    for (const auto& s : scores)
        out << "score " << names[static_cast<std::size_t>(s.node)] << ' ' << format_double(s.log_score) << "\n";
    out << "total-score " << format_double(total_score) << "\n";
}

ModelFile read_model_file(std::istream& in) {
    std::vector<std::string> problems;
    std::string line;
    int line_no = 0;

    int declared_vars = -1, declared_arcs = -1;
    std::vector<std::string> names;
    std::map<std::string, int> index_of;
    std::vector<std::string> ordering_names;
    std::vector<std::pair<std::string, std::string>> arcs;
    std::map<std::string, double> scores;
    double total_score = 0.0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        auto fail = [&](const std::string& msg) {
            problems.push_back("line " + std::to_string(line_no) + ": " + msg);
        };
        if (tokens[0] == "vars" && tokens.size() == 2) {
            declared_vars = std::stoi(tokens[1]);
        } else if (tokens[0] == "var" && tokens.size() == 3) {
            const int idx = std::stoi(tokens[1]);
            if (idx != static_cast<int>(names.size())) fail("var indices must be consecutive");
            index_of[tokens[2]] = static_cast<int>(names.size());
            names.push_back(tokens[2]);
        } else if (tokens[0] == "ordering") {
            ordering_names.assign(tokens.begin() + 1, tokens.end());
        } else if (tokens[0] == "arcs" && tokens.size() == 2) {
            declared_arcs = std::stoi(tokens[1]);
        } else if (tokens[0] == "arc" && tokens.size() == 3) {
            arcs.emplace_back(tokens[1], tokens[2]);
        } else if (tokens[0] == "score" && tokens.size() == 3) {
            scores[tokens[1]] = std::stod(tokens[2]);
        } else if (tokens[0] == "total-score" && tokens.size() == 2) {
            total_score = std::stod(tokens[1]);
        } else {
            fail("unrecognized line '" + tokens[0] + "'");
        }
    }

    if (declared_vars >= 0 && declared_vars != static_cast<int>(names.size()))
        problems.push_back("vars count " + std::to_string(declared_vars) + " does not match " +
                           std::to_string(names.size()) + " var lines");
    if (declared_arcs >= 0 && declared_arcs != static_cast<int>(arcs.size()))
        problems.push_back("arcs count " + std::to_string(declared_arcs) + " does not match " +
                           std::to_string(arcs.size()) + " arc lines");
    const int n = static_cast<int>(names.size());
    std::vector<int> ordering;
    for (const auto& nm : ordering_names) {
        auto it = index_of.find(nm);
        if (it == index_of.end()) problems.push_back("ordering names unknown node '" + nm + "'");
        else ordering.push_back(it->second);
    }
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
    for (const auto& [p_name, c_name] : arcs) {
        auto pi = index_of.find(p_name);
        auto ci = index_of.find(c_name);
        if (pi == index_of.end()) problems.push_back("arc names unknown node '" + p_name + "'");
        if (ci == index_of.end()) problems.push_back("arc names unknown node '" + c_name + "'");
        if (pi != index_of.end() && ci != index_of.end())
            parents[static_cast<std::size_t>(ci->second)].push_back(pi->second);
    }
    if (!problems.empty()) throw ValidationError("invalid model file", problems);

    ModelFile out{Dag(std::move(parents), std::move(ordering)), names,
                  std::vector<double>(static_cast<std::size_t>(n), 0.0), total_score};
    for (const auto& [nm, s] : scores) {
        auto it = index_of.find(nm);
        if (it != index_of.end()) out.scores[static_cast<std::size_t>(it->second)] = s;
    }
    return out;
}

ModelFile read_model_file_from(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file '" + path + "'");
    try {
        return read_model_file(in);
    } catch (const ValidationError& e) {
        throw ValidationError("in '" + path + "': " + e.what());
    }
}

Dag align_model_to_dataset(const ModelFile& model, const Dataset& data) {
    std::vector<std::string> problems;
    std::map<std::string, int> data_index;
    for (int c = 0; c < data.vars(); ++c) data_index[data.name(c)] = c;

    if (model.dag.nodes() != data.vars())
        problems.push_back("model has " + std::to_string(model.dag.nodes()) +
                           " nodes, dataset has " + std::to_string(data.vars()));
    std::vector<int> to_data(model.names.size(), -1);
    for (std::size_t i = 0; i < model.names.size(); ++i) {
        auto it = data_index.find(model.names[i]);
        if (it == data_index.end())
            problems.push_back("model node '" + model.names[i] + "' is not a dataset column");
        else
            to_data[i] = it->second;
    }
    if (!problems.empty()) throw ValidationError("model/dataset mismatch", problems);

    std::vector<int> ordering;
    ordering.reserve(model.dag.ordering().size());
    for (int v : model.dag.ordering()) ordering.push_back(to_data[static_cast<std::size_t>(v)]);
    if (ordering != data.ordering())
        throw ValidationError(
            "model ordering does not match dataset ordering; orderings are never reconciled "
            "silently");

    std::vector<std::vector<int>> parents(static_cast<std::size_t>(data.vars()));
    for (int child = 0; child < model.dag.nodes(); ++child)
        for (int p : model.dag.parents(child))
            parents[static_cast<std::size_t>(to_data[static_cast<std::size_t>(child)])].push_back(
                to_data[static_cast<std::size_t>(p)]);
    return Dag(std::move(parents), data.ordering());
}

namespace {

std::vector<double> parse_double_list(const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& value) {
    std::vector<int> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in) {
    ExperimentSpec spec;
    std::vector<std::string> problems;
    std::set<std::string> seen;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        seen.insert(key);
        try {
            if (key == "method") spec.method = value;
            else if (key == "network") spec.network = value;
            else if (key == "sizes") spec.sizes = parse_int_list(value);
            else if (key == "kappas") spec.kappas = parse_double_list(value);
            else if (key == "alpha") spec.alpha = std::stod(value);
            else if (key == "family") spec.family = value;
            else if (key == "replicates") spec.replicates = std::stoi(value);
            else if (key == "Q") spec.q_permutations = std::stoi(value);
            else if (key == "k") spec.size_limit = std::stoi(value);
            else if (key == "thresholds") spec.thresholds = parse_double_list(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else if (key == "max_parents") spec.max_parents = std::stoi(value);
            else if (key == "max_model_arcs") spec.max_model_arcs = std::stoi(value);
            else if (key == "bayes_kappa") spec.bayes_kappa = std::stod(value);
            else if (key == "bayes_alpha") spec.bayes_alpha = std::stod(value);
            else
                problems.push_back("line " + std::to_string(line_no) + ": unknown key '" + key +
                                   "'");
        } catch (const std::exception&) {
            problems.push_back("line " + std::to_string(line_no) + ": bad value for '" + key +
                               "'");
        }
    }

    if (!seen.count("method")) problems.push_back("missing required key 'method'");
    if (!seen.count("network")) problems.push_back("missing required key 'network'");
    if (spec.method != "fdr" && spec.method != "bayes" && spec.method != "both" &&
        seen.count("method"))
        problems.push_back("method must be fdr, bayes, or both (got '" + spec.method + "')");
    if ((spec.method == "fdr" || spec.method == "both") && spec.kappas.empty())
        problems.push_back("method '" + spec.method + "' requires a kappas list");
    if (spec.sizes.empty()) spec.sizes = {1000};
    if (!problems.empty()) throw ValidationError("invalid experiment spec", problems);
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open experiment spec '" + path + "'");
    try {
        return parse_experiment_spec(in);
    } catch (const ValidationError& e) {
        throw ValidationError("in '" + path + "': " + e.what());
    }
}

}  // namespace arcconf
