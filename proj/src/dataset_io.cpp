#include "kong/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>

namespace kong {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <class Int>
Int parse_int(std::string_view field, const std::string& file, std::size_t line_no, std::string_view what) {
    Int value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError(file, line_no, "expected integer " + std::string(what) + ", got '" +
                                            std::string(field) + "'");
    }
    return value;
}

/// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        lines.emplace_back(line_no, std::string(t));
    }
    return lines;
}

fs::path require_file(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw ParseError(path.string(), 0, "missing mandatory file");
    return path;
}

std::string detect_prefix(const fs::path& directory) {
    if (!fs::is_directory(directory)) throw ParseError(directory.string(), 0, "not a directory");
    std::vector<std::string> candidates;
    for (const auto& entry : fs::directory_iterator(directory)) {
        const std::string name = entry.path().filename().string();
        constexpr std::string_view suffix = "_A.txt";
        if (name.size() > suffix.size() && name.ends_with(suffix))
            candidates.push_back(name.substr(0, name.size() - suffix.size()));
    }
    if (candidates.empty()) throw ParseError((directory / "DS_A.txt").string(), 0, "missing mandatory file");
    if (candidates.size() > 1) throw ParseError(directory.string(), 0, "more than one *_A.txt file");
    return candidates.front();
}

void write_or_throw(std::ofstream& out, const fs::path& path) {
    if (!out) throw DataError("cannot write " + path.string());
}

}  // namespace

GraphDataset parse_benchmark_dataset(const fs::path& directory, const BenchmarkOptions& options) {
    const std::string ds = detect_prefix(directory);
    const fs::path a_path = require_file(directory / (ds + "_A.txt"));
    const fs::path ind_path = require_file(directory / (ds + "_graph_indicator.txt"));
    const fs::path gl_path = require_file(directory / (ds + "_graph_labels.txt"));
    const fs::path nl_path = require_file(directory / (ds + "_node_labels.txt"));
    const fs::path order_path = directory / (ds + "_edge_order.txt");

    GraphDataset dataset;

    const auto gl_lines = read_lines(gl_path);
    for (const auto& [no, text] : gl_lines) {
        const auto fields = split_fields(text);
        dataset.classes.push_back(parse_int<int>(fields.front(), gl_path.string(), no, "graph label"));
    }
    const std::size_t graph_count = dataset.classes.size();

    const auto ind_lines = read_lines(ind_path);
    const std::size_t node_count = ind_lines.size();
    std::vector<std::size_t> graph_of(node_count);
    std::vector<std::uint32_t> local_of(node_count);
    std::vector<std::uint32_t> sizes(graph_count, 0);
    for (std::size_t v = 0; v < node_count; ++v) {
        const auto& [no, text] = ind_lines[v];
        const auto g = parse_int<std::int64_t>(text, ind_path.string(), no, "graph id");
        if (g < 1 || static_cast<std::size_t>(g) > graph_count) {
            throw ParseError(ind_path.string(), no,
                             "graph id " + std::to_string(g) + " outside 1.." + std::to_string(graph_count) +
                                 " (indicator/labels length mismatch with " + gl_path.filename().string() + ")");
        }
        graph_of[v] = static_cast<std::size_t>(g - 1);
        local_of[v] = sizes[graph_of[v]]++;
    }

    const auto nl_lines = read_lines(nl_path);
    if (nl_lines.size() != node_count) {
        const std::size_t line = nl_lines.size() > node_count ? nl_lines[node_count].first : 0;
        throw ParseError(nl_path.string(), line,
                         "has " + std::to_string(nl_lines.size()) + " labels but " + ind_path.filename().string() +
                             " lists " + std::to_string(node_count) + " nodes");
    }
    std::vector<std::string> raw_labels;
    raw_labels.reserve(node_count);
    for (const auto& [no, text] : nl_lines) raw_labels.emplace_back(split_fields(text).front());
    dataset.alphabet = LabelAlphabet::canonical(raw_labels);

    struct Arc {
        std::int64_t rank;
        std::size_t line;
        std::uint32_t target;
    };
    std::vector<std::vector<Arc>> arcs(node_count);

    const auto a_lines = read_lines(a_path);
    std::optional<std::vector<std::pair<std::size_t, std::string>>> order_lines;
    if (fs::exists(order_path)) {
        order_lines = read_lines(order_path);
        if (order_lines->size() != a_lines.size()) {
            throw ParseError(order_path.string(), 0,
                             "has " + std::to_string(order_lines->size()) + " ranks but " +
                                 a_path.filename().string() + " has " + std::to_string(a_lines.size()) + " edges");
        }
    }
    for (std::size_t e = 0; e < a_lines.size(); ++e) {
        const auto& [no, text] = a_lines[e];
        const auto fields = split_fields(text);
        if (fields.size() != 2) throw ParseError(a_path.string(), no, "expected 'i, j'");
        const auto i = parse_int<std::int64_t>(fields[0], a_path.string(), no, "node index");
        const auto j = parse_int<std::int64_t>(fields[1], a_path.string(), no, "node index");
        for (auto x : {i, j}) {
            if (x < 1 || static_cast<std::size_t>(x) > node_count) {
                throw ParseError(a_path.string(), no,
                                 "node index " + std::to_string(x) + " out of range 1.." + std::to_string(node_count));
            }
        }
        const auto src = static_cast<std::size_t>(i - 1);
        const auto dst = static_cast<std::size_t>(j - 1);
        if (graph_of[src] != graph_of[dst]) throw ParseError(a_path.string(), no, "edge connects two graphs");
        std::int64_t rank = static_cast<std::int64_t>(e);
        if (order_lines) {
            const auto& [ono, otext] = (*order_lines)[e];
            rank = parse_int<std::int64_t>(otext, order_path.string(), ono, "edge rank");
        }
        arcs[src].push_back({rank, e, local_of[dst]});
    }

    std::vector<std::vector<LabelId>> labels(graph_count);
    std::vector<std::vector<std::vector<std::uint32_t>>> adjacency(graph_count);
    for (std::size_t g = 0; g < graph_count; ++g) {
        labels[g].reserve(sizes[g]);
        adjacency[g].resize(sizes[g]);
    }
    for (std::size_t v = 0; v < node_count; ++v) {
        labels[graph_of[v]].push_back(*dataset.alphabet.find(raw_labels[v]));
        auto& list = arcs[v];
        std::stable_sort(list.begin(), list.end(), [](const Arc& x, const Arc& y) {
            return x.rank != y.rank ? x.rank < y.rank : x.line < y.line;
        });
        auto& out = adjacency[graph_of[v]][local_of[v]];
        std::set<std::uint32_t> seen;
        for (const Arc& arc : list) {
            if (seen.insert(arc.target).second) out.push_back(arc.target);
        }
    }

    for (std::size_t g = 0; g < graph_count; ++g) {
        Graph graph(std::move(labels[g]), std::move(adjacency[g]), !options.undirected);
        dataset.graphs.push_back(options.undirected ? symmetrize(graph) : std::move(graph));
        dataset.graph_ids.push_back(static_cast<std::int64_t>(g + 1));
    }
    dataset.validate();
    return dataset;
}

void write_benchmark_dataset(const GraphDataset& dataset, const fs::path& directory, const std::string& name) {
    fs::create_directories(directory);
    const auto path = [&](const char* suffix) { return directory / (name + suffix); };
    std::ofstream a(path("_A.txt")), ind(path("_graph_indicator.txt")), gl(path("_graph_labels.txt")),
        nl(path("_node_labels.txt"));
    std::size_t offset = 0;
    for (std::size_t g = 0; g < dataset.size(); ++g) {
        const Graph& graph = dataset.graphs[g];
        gl << dataset.classes[g] << '\n';
        for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
            ind << (g + 1) << '\n';
            nl << dataset.alphabet.name(graph.label(v)) << '\n';
            for (std::uint32_t u : graph.neighbors(v)) a << (offset + v + 1) << ", " << (offset + u + 1) << '\n';
        }
        offset += graph.node_count();
    }
    write_or_throw(a, path("_A.txt"));
    write_or_throw(nl, path("_node_labels.txt"));
}

std::optional<std::size_t> NodeTable::find(std::int64_t graph_id, std::int64_t node) const {
    auto it = index.find({graph_id, node});
    if (it == index.end()) return std::nullopt;
    return it->second;
}

NodeTable::Entry NodeTable::entry(std::size_t global) const {
    const auto it = std::upper_bound(graph_offsets.begin(), graph_offsets.end(), global);
    const auto g = static_cast<std::size_t>(it - graph_offsets.begin()) - 1;
    return {g, static_cast<std::uint32_t>(global - graph_offsets[g]), labels[global]};
}

NodeTable read_node_table(const fs::path& labels_path, const std::optional<fs::path>& classes_path) {
    const std::string file = labels_path.string();
    struct Row {
        std::int64_t graph;
        std::int64_t node;
        std::string label;
        std::size_t line;
    };
    std::vector<Row> rows;
    for (auto& [no, text] : read_lines(require_file(labels_path))) {
        const auto fields = split_fields(text);
        if (fields.size() != 3 || fields[2].empty()) throw ParseError(file, no, "expected 'graph_id,node,label'");
        rows.push_back({parse_int<std::int64_t>(fields[0], file, no, "graph id"),
                        parse_int<std::int64_t>(fields[1], file, no, "node id"), std::string(fields[2]), no});
    }

    std::map<std::int64_t, int> class_of;
    if (classes_path) {
        const std::string cfile = classes_path->string();
        for (auto& [no, text] : read_lines(require_file(*classes_path))) {
            const auto fields = split_fields(text);
            if (fields.size() != 2) throw ParseError(cfile, no, "expected 'graph_id,class'");
            const auto g = parse_int<std::int64_t>(fields[0], cfile, no, "graph id");
            if (!class_of.emplace(g, parse_int<int>(fields[1], cfile, no, "class")).second)
                throw ParseError(cfile, no, "duplicate graph id " + std::to_string(g));
        }
    }

    std::vector<std::string> raw;
    raw.reserve(rows.size());
    for (const auto& r : rows) raw.push_back(r.label);

    NodeTable table;
    table.alphabet = LabelAlphabet::canonical(std::move(raw));

    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        return std::tie(x.graph, x.node, x.line) < std::tie(y.graph, y.node, y.line);
    });
    std::set<std::int64_t> graph_ids;
    for (const auto& [g, c] : class_of) graph_ids.insert(g);
    for (const auto& r : rows) graph_ids.insert(r.graph);
    table.graph_ids.assign(graph_ids.begin(), graph_ids.end());

    std::size_t r = 0;
    for (std::int64_t g : table.graph_ids) {
        table.graph_offsets.push_back(table.labels.size());
        auto it = class_of.find(g);
        table.classes.push_back(it == class_of.end() ? 0 : it->second);
        for (; r < rows.size() && rows[r].graph == g; ++r) {
            if (r > 0 && rows[r - 1].graph == g && rows[r - 1].node == rows[r].node) {
                throw ParseError(file, rows[r].line,
                                 "duplicate label for node " + std::to_string(rows[r].node) + " of graph " +
                                     std::to_string(g));
            }
            table.index.emplace(std::pair{g, rows[r].node}, table.labels.size());
            table.labels.push_back(*table.alphabet.find(rows[r].label));
        }
    }
    table.graph_offsets.push_back(table.labels.size());
    return table;
}

std::optional<EdgeRecord> parse_edge_line(std::string_view line, const std::string& file, std::size_t line_no) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') return std::nullopt;
    const auto fields = split_fields(t);
    if (fields.size() != 4) throw ParseError(file, line_no, "expected 'graph_id,src,dst,order_key'");
    return EdgeRecord{parse_int<std::int64_t>(fields[0], file, line_no, "graph id"),
                      parse_int<std::int64_t>(fields[1], file, line_no, "source node"),
                      parse_int<std::int64_t>(fields[2], file, line_no, "target node"),
                      parse_int<std::int64_t>(fields[3], file, line_no, "order key")};
}

GraphDataset parse_temporal_edge_list(const TemporalFiles& files) {
    const NodeTable table = read_node_table(files.labels, files.classes);
    const std::string efile = files.edges.string();

    struct Arc {
        std::int64_t key;
        LabelId label;
        std::uint32_t target;
    };
    std::vector<std::vector<Arc>> arcs(table.node_count());
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen;

    std::ifstream in(require_file(files.edges));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto rec = parse_edge_line(line, efile, line_no);
        if (!rec) continue;
        const auto src = table.find(rec->graph_id, rec->src);
        const auto dst = table.find(rec->graph_id, rec->dst);
        if (!src || !dst) {
            throw ParseError(efile, line_no,
                             "edge references unlabeled node " + std::to_string(src ? rec->dst : rec->src) +
                                 " of graph " + std::to_string(rec->graph_id));
        }
        if (!seen.insert({rec->graph_id, rec->src, rec->dst}).second) {
            throw ParseError(efile, line_no,
                             "duplicate edge (" + std::to_string(rec->graph_id) + "," + std::to_string(rec->src) +
                                 "," + std::to_string(rec->dst) + ")");
        }
        const auto target = table.entry(*dst);
        arcs[*src].push_back({rec->order_key, target.label, target.local_id});
    }

    GraphDataset dataset;
    dataset.alphabet = table.alphabet;
    dataset.graph_ids = table.graph_ids;
    dataset.classes = table.classes;
    for (std::size_t g = 0; g < table.graph_count(); ++g) {
        const std::size_t begin = table.graph_offsets[g];
        const std::size_t end = table.graph_offsets[g + 1];
        std::vector<LabelId> labels(table.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                                    table.labels.begin() + static_cast<std::ptrdiff_t>(end));
        std::vector<std::vector<std::uint32_t>> adjacency(end - begin);
        for (std::size_t v = begin; v < end; ++v) {
            auto& list = arcs[v];
            std::sort(list.begin(), list.end(), [](const Arc& x, const Arc& y) {
                return std::tie(x.key, x.label, x.target) < std::tie(y.key, y.label, y.target);
            });
            for (const Arc& arc : list) adjacency[v - begin].push_back(arc.target);
        }
        dataset.graphs.emplace_back(std::move(labels), std::move(adjacency), true);
    }
    dataset.validate();
    return dataset;
}

void write_temporal_edge_list(const GraphDataset& dataset, const TemporalFiles& files) {
    dataset.validate();
    std::ofstream edges(files.edges), labels(files.labels);
    for (std::size_t g = 0; g < dataset.size(); ++g) {
        const Graph& graph = dataset.graphs[g];
        const auto gid = dataset.graph_ids[g];
        for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
            labels << gid << ',' << v << ',' << dataset.alphabet.name(graph.label(v)) << '\n';
            const auto nbrs = graph.neighbors(v);
            for (std::size_t pos = 0; pos < nbrs.size(); ++pos)
                edges << gid << ',' << v << ',' << nbrs[pos] << ',' << pos << '\n';
        }
    }
    write_or_throw(edges, files.edges);
    write_or_throw(labels, files.labels);
    if (files.classes) {
        std::ofstream classes(*files.classes);
        for (std::size_t g = 0; g < dataset.size(); ++g) classes << dataset.graph_ids[g] << ',' << dataset.classes[g] << '\n';
        write_or_throw(classes, *files.classes);
    }
}

}  // namespace kong
