#ifndef TDGAT_DATASETS_HPP
#define TDGAT_DATASETS_HPP

// Corpus management: canonical JSONL ingestion, dev splitting, label
// statistics and the synthetic desk-scale corpus generator.

#include "depgraph.hpp"
#include "embeddings.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tdgat {

enum class Split { train = 0, dev = 1, test = 2 };

const char* to_string(Split s);

struct Example {
    ParsedSentence sentence; // kept for round-tripping to JSONL
    DepGraph graph;
    Polarity label;
    Split split = Split::train;
};

struct Corpus {
    std::string name;
    std::vector<Example> examples;

    size_t size() const { return examples.size(); }
    Corpus subset(Split s) const;
};

// Builds graphs up front; every sentence needs its span and polarity.
Corpus corpus_from_sentences(std::vector<ParsedSentence> sentences, std::string name,
                             Split split = Split::train);

Corpus load_corpus_jsonl(const std::string& path, std::string name, Split split = Split::train);

// CoNLL-U sentences completed by an aligned aspects sidecar: one JSON
// object per sentence with keys aspect_span and polarity.
Corpus load_corpus_conllu(const std::string& conllu_path, const std::string& aspects_jsonl_path,
                          std::string name, Split split = Split::train);

void save_corpus_jsonl(const Corpus& corpus, std::ostream& out);

// Seeded uniform sample of n dev indices out of corpus_size.
std::vector<size_t> sample_dev_indices(size_t corpus_size, int n, uint64_t seed);

// Seeded uniform sample of n examples tagged dev, remainder train.
// Corpus order is preserved within each part.
std::pair<Corpus, Corpus> split_dev(const Corpus& corpus, int n, uint64_t seed);

// Published-split sidecar: explicit dev example indices, one per line.
std::pair<Corpus, Corpus> split_dev_sidecar(const Corpus& corpus, const std::vector<size_t>& dev_indices);
std::vector<size_t> load_split_sidecar(std::istream& in);

// counts[split][polarity]
struct DatasetStats {
    std::array<std::array<long, 3>, 3> counts{};
    long total = 0;
};

DatasetStats dataset_stats(const Corpus& corpus);

// Word lists for the synthetic corpus. Each sentence carries exactly
// one sentiment word, attached at dependency distance 1 or 2 from the
// aspect node; the label is the sentiment word's class.
struct SynthVocab {
    std::vector<std::string> aspects;
    std::vector<std::string> aspect_suffixes; // optional second aspect word
    std::vector<std::string> linkers;
    std::vector<std::string> fillers;
    std::array<std::vector<std::string>, 3> sentiment; // [polarity]
};

SynthVocab default_synth_vocab();
std::vector<std::string> synth_vocab_words(const SynthVocab& vocab);

// Class-balanced up to rounding; solvable from graph structure plus
// embeddings alone (the label is a function of the sentiment word).
Corpus synth_corpus(int size, const SynthVocab& vocab, uint64_t seed);

// Deterministic random embeddings covering the synthetic vocabulary.
EmbeddingTable synth_embeddings(const SynthVocab& vocab, int dim, uint64_t seed);

} // namespace tdgat

#endif
