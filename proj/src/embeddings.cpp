#include "embeddings.hpp"

#include "errors.hpp"
#include "rng.hpp"

#include <zlib.h>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tdgat {

namespace {

bool parse_double(std::string_view s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

} // namespace

EmbeddingTable load_glove(std::istream& in, int expected_dim) {
    EmbeddingTable table;
    table.dim = expected_dim;
    std::string line;
    int line_no = 0;
    std::vector<double> vec;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const size_t word_end = line.find(' ');
        if (word_end == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": no vector components");
        const std::string word = line.substr(0, word_end);

        vec.clear();
        size_t pos = word_end + 1;
        while (pos < line.size()) {
            size_t next = line.find(' ', pos);
            if (next == std::string::npos) next = line.size();
            if (next > pos) {
                double v = 0.0;
                if (!parse_double(std::string_view(line).substr(pos, next - pos), v))
                    throw ParseError("line " + std::to_string(line_no) + ": non-numeric component for word '" +
                                     word + "'");
                vec.push_back(v);
            }
            pos = next + 1;
        }
        if (vec.empty())
            throw ParseError("line " + std::to_string(line_no) + ": no vector components for word '" + word + "'");

        if (table.dim == 0) {
            table.dim = static_cast<int>(vec.size());
        } else if (static_cast<int>(vec.size()) != table.dim) {
            throw ParseError("line " + std::to_string(line_no) + ": word '" + word + "' has " +
                             std::to_string(vec.size()) + " components, expected " + std::to_string(table.dim));
        }
        if (!table.vectors.emplace(word, vec).second) ++table.duplicate_count; // first wins
    }
    if (table.vectors.empty()) throw ParseError("empty embedding file");
    return table;
}

EmbeddingTable load_glove_file(const std::string& path, int expected_dim) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open embedding file: " + path);
    char magic[2] = {0, 0};
    file.read(magic, 2);
    file.close();

    if (static_cast<unsigned char>(magic[0]) == 0x1f && static_cast<unsigned char>(magic[1]) == 0x8b) {
        gzFile gz = gzopen(path.c_str(), "rb");
        if (!gz) throw IoError("cannot open gzip embedding file: " + path);
        std::string text;
        char buf[1 << 16];
        int n = 0;
        while ((n = gzread(gz, buf, sizeof buf)) > 0) text.append(buf, static_cast<size_t>(n));
        const bool bad = n < 0;
        gzclose(gz);
        if (bad) throw IoError("gzip read error in: " + path);
        std::istringstream in(text);
        return load_glove(in, expected_dim);
    }

    std::ifstream in(path);
    return load_glove(in, expected_dim);
}

void save_glove(const EmbeddingTable& table, std::ostream& out) {
    // sorted for byte-stable output
    std::vector<const std::string*> words;
    words.reserve(table.vectors.size());
    for (const auto& [w, _] : table.vectors) words.push_back(&w);
    std::sort(words.begin(), words.end(), [](const auto* a, const auto* b) { return *a < *b; });
    out << std::setprecision(17);
    for (const auto* w : words) {
        out << *w;
        for (double v : table.vectors.at(*w)) out << ' ' << v;
        out << '\n';
    }
}

std::vector<double> lookup(const EmbeddingTable& table, const std::string& word) {
    auto it = table.vectors.find(word);
    if (it != table.vectors.end()) return it->second;
    std::vector<double> v(table.dim, 0.0);
    if (table.oov_policy == OovPolicy::zeros) return v;
    uint64_t state = fnv1a(word) ^ (table.oov_seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    for (double& c : v) {
        const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53; // [0,1)
        c = u * 0.1 - 0.05;
    }
    return v;
}

Matrix node_features(const DepGraph& graph, const EmbeddingTable& table) {
    Matrix x(graph.node_count, table.dim);
    for (int i = 0; i < graph.node_count; ++i) {
        const auto& words = graph.node_words[i];
        for (const std::string& w : words) {
            const std::vector<double> v = lookup(table, w);
            for (int j = 0; j < table.dim; ++j) x.at(i, j) += v[j];
        }
        for (int j = 0; j < table.dim; ++j) x.at(i, j) /= static_cast<double>(words.size());
    }
    return x;
}

} // namespace tdgat
