#include "depgraph.hpp"

#include "errors.hpp"
#include "rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>

namespace tdgat {

const char* to_string(Polarity p) {
    switch (p) {
        case Polarity::positive: return "positive";
        case Polarity::neutral: return "neutral";
        case Polarity::negative: return "negative";
    }
    return "?";
}

std::optional<Polarity> polarity_from_string(const std::string& s) {
    if (s == "positive") return Polarity::positive;
    if (s == "neutral") return Polarity::neutral;
    if (s == "negative") return Polarity::negative;
    return std::nullopt;
}

void ParsedSentence::validate() const {
    const int n = static_cast<int>(tokens.size());
    if (static_cast<int>(heads.size()) != n)
        throw ParseError("heads length differs from tokens length");
    int roots = 0;
    for (int i = 0; i < n; ++i) {
        if (heads[i] == -1) {
            ++roots;
            continue;
        }
        if (heads[i] < 0 || heads[i] >= n)
            throw ParseError("head index out of range at token " + std::to_string(i));
        if (heads[i] == i) throw ParseError("self-head at token " + std::to_string(i));
    }
    if (roots == 0) throw ParseError("no root (no head entry equals -1)");
    if (roots > 1) throw ParseError("multiple roots");
    if (aspect_span) {
        const Span s = *aspect_span;
        if (!(0 <= s.start && s.start < s.end && s.end <= n)) throw ParseError("span out of range");
    }
}

void DepGraph::validate() const {
    if (node_count <= 0) throw ParseError("graph has no nodes");
    if (static_cast<int>(adjacency.size()) != node_count ||
        static_cast<int>(node_words.size()) != node_count)
        throw ParseError("graph field sizes disagree with node_count");
    if (target_node < 0 || target_node >= node_count)
        throw ParseError("target node out of range");
    for (int i = 0; i < node_count; ++i) {
        for (int j : adjacency[i]) {
            if (j < 0 || j >= node_count) throw ParseError("adjacency index out of range");
            if (j == i) throw ParseError("self-entry stored in adjacency");
            if (!std::binary_search(adjacency[j].begin(), adjacency[j].end(), i))
                throw ParseError("adjacency not symmetric");
        }
        if (!std::is_sorted(adjacency[i].begin(), adjacency[i].end()))
            throw ParseError("adjacency list not sorted");
    }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    size_t pos = 0;
    while (true) {
        size_t tab = line.find('\t', pos);
        if (tab == std::string::npos) {
            cols.push_back(line.substr(pos));
            break;
        }
        cols.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
    return cols;
}

bool parse_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    size_t i = 0;
    bool neg = false;
    if (s[0] == '-') {
        neg = true;
        i = 1;
        if (s.size() == 1) return false;
    }
    long v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
        if (v > 1'000'000'000) return false;
    }
    out = static_cast<int>(neg ? -v : v);
    return true;
}

} // namespace

std::vector<ParsedSentence> parse_conllu(const std::string& text) {
    std::vector<ParsedSentence> sentences;
    std::vector<std::string> tokens;
    std::vector<int> raw_heads; // 1-based, 0 = root
    std::vector<int> head_lines;
    int block_first_line = 0;

    auto finish_block = [&](int line_no) {
        if (tokens.empty()) return;
        ParsedSentence s;
        s.tokens = std::move(tokens);
        const int n = static_cast<int>(s.tokens.size());
        s.heads.resize(n);
        for (int i = 0; i < n; ++i) {
            const int h = raw_heads[i];
            if (h < 0 || h > n)
                throw ParseError("line " + std::to_string(head_lines[i]) +
                                 ": HEAD " + std::to_string(h) + " out of range for a " +
                                 std::to_string(n) + "-token sentence");
            s.heads[i] = h - 1; // 0 (root) becomes -1
        }
        try {
            s.validate();
        } catch (const ParseError& e) {
            throw ParseError("sentence starting at line " + std::to_string(block_first_line) +
                             ": " + e.what());
        }
        sentences.push_back(std::move(s));
        tokens.clear();
        raw_heads.clear();
        head_lines.clear();
        (void)line_no;
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            finish_block(line_no);
            continue;
        }
        if (line[0] == '#') continue;
        std::vector<std::string> cols = split_tabs(line);
        if (cols.size() != 10)
            throw ParseError("line " + std::to_string(line_no) + ": expected 10 tab-separated columns, got " +
                             std::to_string(cols.size()));
        if (cols[0].find('-') != std::string::npos) continue; // multi-word token range
        int head = 0;
        if (!parse_int(cols[6], head) || head < 0)
            throw ParseError("line " + std::to_string(line_no) + ": HEAD column is not a non-negative integer: '" +
                             cols[6] + "'");
        if (tokens.empty()) block_first_line = line_no;
        tokens.push_back(cols[1]);
        raw_heads.push_back(head);
        head_lines.push_back(line_no);
    }
    finish_block(line_no);
    return sentences;
}

std::vector<ParsedSentence> load_jsonl(std::istream& in) {
    using nlohmann::json;
    std::vector<ParsedSentence> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        auto fail = [&](const std::string& what) -> ParseError {
            return ParseError("line " + std::to_string(line_no) + ": " + what);
        };
        for (const char* key : {"tokens", "heads", "aspect_span"})
            if (!j.contains(key)) throw fail(std::string("missing key '") + key + "'");

        ParsedSentence s;
        try {
            s.tokens = j["tokens"].get<std::vector<std::string>>();
            s.heads = j["heads"].get<std::vector<int>>();
            auto span = j["aspect_span"].get<std::vector<int>>();
            if (span.size() != 2) throw fail("aspect_span must be [start, end)");
            s.aspect_span = Span{span[0], span[1]};
        } catch (const json::exception& e) {
            throw fail(std::string("bad field type: ") + e.what());
        }
        if (j.contains("polarity")) {
            const std::string p = j["polarity"].get<std::string>();
            s.polarity = polarity_from_string(p);
            if (!s.polarity) throw fail("unknown polarity string '" + p + "'");
        }
        try {
            s.validate();
        } catch (const ParseError& e) {
            throw fail(e.what());
        }
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

void add_edge(std::vector<std::vector<int>>& adj, int u, int v) {
    adj[u].push_back(v);
    adj[v].push_back(u);
}

void sort_dedup(std::vector<std::vector<int>>& adj) {
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
}

bool connected(const DepGraph& g) {
    std::vector<char> seen(g.node_count, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 0;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        ++visited;
        for (int v : g.adjacency[u])
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
    }
    return visited == g.node_count;
}

} // namespace

DepGraph build_graph(const ParsedSentence& sentence) {
    sentence.validate();
    if (!sentence.aspect_span) throw ParseError("sentence has no aspect span");
    const int n = static_cast<int>(sentence.tokens.size());

    DepGraph raw;
    raw.node_count = n;
    raw.adjacency.resize(n);
    raw.node_words.resize(n);
    for (int i = 0; i < n; ++i) {
        raw.node_words[i] = {sentence.tokens[i]};
        if (sentence.heads[i] >= 0) add_edge(raw.adjacency, i, sentence.heads[i]);
    }
    sort_dedup(raw.adjacency);

    DepGraph g = collapse_target(raw, *sentence.aspect_span);
    if (!connected(g))
        std::cerr << "tdgat: warning: dependency graph is not connected ("
                  << sentence.tokens[0] << " ...)\n";
    return g;
}

DepGraph collapse_target(const DepGraph& precursor, Span span) {
    const int n = precursor.node_count;
    if (!(0 <= span.start && span.start < span.end && span.end <= n))
        throw ParseError("span out of range");
    const int shrink = span.length() - 1;

    auto map_index = [&](int v) {
        if (v < span.start) return v;
        if (v < span.end) return span.start;
        return v - shrink;
    };

    DepGraph g;
    g.node_count = n - shrink;
    g.adjacency.resize(g.node_count);
    g.target_node = span.start;
    g.node_words.resize(g.node_count);

    for (int u = 0; u < n; ++u) {
        for (int v : precursor.adjacency[u]) {
            if (v < u) continue; // each undirected edge once
            const int nu = map_index(u);
            const int nv = map_index(v);
            if (nu == nv) continue; // edge internal to the span
            add_edge(g.adjacency, nu, nv);
        }
    }
    sort_dedup(g.adjacency);

    for (int u = 0; u < n; ++u) {
        auto& words = g.node_words[map_index(u)];
        words.insert(words.end(), precursor.node_words[u].begin(), precursor.node_words[u].end());
    }
    return g;
}

std::vector<int> neighborhood(const DepGraph& graph, int i, bool self_loop) {
    if (i < 0 || i >= graph.node_count)
        throw std::out_of_range("neighborhood: node index " + std::to_string(i) + " out of range");
    std::vector<int> result = graph.adjacency[i];
    if (self_loop) result.insert(std::lower_bound(result.begin(), result.end(), i), i);
    return result;
}

DepGraph random_tree_graph(int n, Rng& rng) {
    if (n <= 0) throw std::invalid_argument("random_tree_graph: n must be positive");
    DepGraph g;
    g.node_count = n;
    g.adjacency.resize(n);
    g.node_words.resize(n);
    for (int i = 0; i < n; ++i) g.node_words[i] = {"w" + std::to_string(i)};
    for (int i = 1; i < n; ++i) add_edge(g.adjacency, i, static_cast<int>(rng.uniform_index(i)));
    sort_dedup(g.adjacency);
    g.target_node = static_cast<int>(rng.uniform_index(n));
    return g;
}

} // namespace tdgat
