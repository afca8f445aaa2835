#ifndef TDGAT_EMBEDDINGS_HPP
#define TDGAT_EMBEDDINGS_HPP

// GloVe-format word vectors and per-node input feature assembly.
// Tables are immutable after load; values never change during training.

#include "autodiff.hpp"
#include "depgraph.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace tdgat {

enum class OovPolicy { hashed, zeros };

struct EmbeddingTable {
    int dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;
    uint64_t oov_seed = 0;
    OovPolicy oov_policy = OovPolicy::hashed;
    size_t duplicate_count = 0; // duplicate lines seen at load, first occurrence kept
};

// "word v1 ... vd" per line, space separated. expected_dim 0 infers the
// dimension from the first line.
EmbeddingTable load_glove(std::istream& in, int expected_dim = 0);

// Detects gzip by magic bytes and inflates before parsing.
EmbeddingTable load_glove_file(const std::string& path, int expected_dim = 0);

void save_glove(const EmbeddingTable& table, std::ostream& out);

// Stored vector, or a deterministic pseudo-random vector with
// components uniform in [-0.05, 0.05] seeded by hash(word, oov_seed).
std::vector<double> lookup(const EmbeddingTable& table, const std::string& word);

// FeatureMatrix: one row per graph node; the meta-node row is the
// arithmetic mean of its words' lookups.
Matrix node_features(const DepGraph& graph, const EmbeddingTable& table);

} // namespace tdgat

#endif
