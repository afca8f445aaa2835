#include "datasets.hpp"

#include "errors.hpp"
#include "rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tdgat {

using nlohmann::json;

const char* to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::dev: return "dev";
        case Split::test: return "test";
    }
    return "?";
}

Corpus Corpus::subset(Split s) const {
    Corpus out;
    out.name = name;
    for (const Example& e : examples)
        if (e.split == s) out.examples.push_back(e);
    return out;
}

Corpus corpus_from_sentences(std::vector<ParsedSentence> sentences, std::string name, Split split) {
    Corpus corpus;
    corpus.name = std::move(name);
    corpus.examples.reserve(sentences.size());
    for (size_t i = 0; i < sentences.size(); ++i) {
        ParsedSentence& s = sentences[i];
        if (!s.polarity)
            throw ParseError("example " + std::to_string(i) + ": missing polarity label");
        Example e;
        e.graph = build_graph(s);
        e.label = *s.polarity;
        e.split = split;
        e.sentence = std::move(s);
        corpus.examples.push_back(std::move(e));
    }
    return corpus;
}

Corpus load_corpus_jsonl(const std::string& path, std::string name, Split split) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    try {
        return corpus_from_sentences(load_jsonl(in), std::move(name), split);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Corpus load_corpus_conllu(const std::string& conllu_path, const std::string& aspects_jsonl_path,
                          std::string name, Split split) {
    std::ifstream cf(conllu_path);
    if (!cf) throw IoError("cannot open dataset: " + conllu_path);
    std::stringstream buf;
    buf << cf.rdbuf();
    std::vector<ParsedSentence> sentences;
    try {
        sentences = parse_conllu(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(conllu_path + ": " + e.what());
    }

    std::ifstream af(aspects_jsonl_path);
    if (!af) throw IoError("cannot open aspects sidecar: " + aspects_jsonl_path);
    std::string line;
    size_t idx = 0;
    int line_no = 0;
    while (std::getline(af, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (idx >= sentences.size())
            throw ParseError(aspects_jsonl_path + ": more aspect records than sentences");
        json j;
        try {
            j = json::parse(line);
            auto span = j.at("aspect_span").get<std::vector<int>>();
            if (span.size() != 2) throw ParseError("aspect_span must be [start, end)");
            sentences[idx].aspect_span = Span{span[0], span[1]};
            const std::string p = j.at("polarity").get<std::string>();
            auto pol = polarity_from_string(p);
            if (!pol) throw ParseError("unknown polarity string '" + p + "'");
            sentences[idx].polarity = pol;
            sentences[idx].validate();
        } catch (const json::exception& e) {
            throw ParseError(aspects_jsonl_path + ": line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError(aspects_jsonl_path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        ++idx;
    }
    if (idx != sentences.size())
        throw ParseError(aspects_jsonl_path + ": " + std::to_string(idx) + " aspect records for " +
                         std::to_string(sentences.size()) + " sentences");
    return corpus_from_sentences(std::move(sentences), std::move(name), split);
}

void save_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const Example& e : corpus.examples) {
        const ParsedSentence& s = e.sentence;
        json j{{"tokens", s.tokens},
               {"heads", s.heads},
               {"aspect_span", {s.aspect_span->start, s.aspect_span->end}},
               {"polarity", to_string(e.label)}};
        out << j.dump() << '\n';
    }
}

std::vector<size_t> sample_dev_indices(size_t corpus_size, int n, uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("split_dev: n must be positive");
    if (corpus_size <= static_cast<size_t>(n))
        throw std::invalid_argument("split_dev: corpus of " + std::to_string(corpus_size) +
                                    " examples is too small for a dev split of " + std::to_string(n));
    std::vector<size_t> order(corpus_size);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    order.resize(static_cast<size_t>(n));
    return order;
}

std::pair<Corpus, Corpus> split_dev(const Corpus& corpus, int n, uint64_t seed) {
    return split_dev_sidecar(corpus, sample_dev_indices(corpus.size(), n, seed));
}

std::pair<Corpus, Corpus> split_dev_sidecar(const Corpus& corpus, const std::vector<size_t>& dev_indices) {
    std::vector<char> is_dev(corpus.size(), 0);
    for (size_t i : dev_indices) {
        if (i >= corpus.size())
            throw std::invalid_argument("dev split: index " + std::to_string(i) + " out of range");
        if (is_dev[i]) throw std::invalid_argument("dev split: duplicate index " + std::to_string(i));
        is_dev[i] = 1;
    }
    Corpus train, dev;
    train.name = corpus.name;
    dev.name = corpus.name;
    for (size_t i = 0; i < corpus.size(); ++i) {
        Example e = corpus.examples[i];
        e.split = is_dev[i] ? Split::dev : Split::train;
        (is_dev[i] ? dev : train).examples.push_back(std::move(e));
    }
    return {std::move(train), std::move(dev)};
}

std::vector<size_t> load_split_sidecar(std::istream& in) {
    std::vector<size_t> indices;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            size_t pos = 0;
            const long v = std::stol(line, &pos);
            if (pos != line.size() || v < 0) throw std::invalid_argument("");
            indices.push_back(static_cast<size_t>(v));
        } catch (const std::exception&) {
            throw ParseError("split sidecar line " + std::to_string(line_no) +
                             ": expected a non-negative example index, got '" + line + "'");
        }
    }
    return indices;
}

DatasetStats dataset_stats(const Corpus& corpus) {
    DatasetStats stats;
    for (const Example& e : corpus.examples) {
        ++stats.counts[static_cast<int>(e.split)][static_cast<int>(e.label)];
        ++stats.total;
    }
    return stats;
}

SynthVocab default_synth_vocab() {
    SynthVocab v;
    v.aspects = {"battery", "screen", "keyboard", "pasta", "service", "coffee"};
    v.aspect_suffixes = {"life", "panel", "unit"};
    v.linkers = {"was", "seemed", "looked"};
    v.fillers = {"the", "quite", "really", "overall", "honestly"};
    v.sentiment[static_cast<int>(Polarity::positive)] = {"stellar", "delightful", "superb"};
    v.sentiment[static_cast<int>(Polarity::neutral)] = {"ordinary", "standard", "typical"};
    v.sentiment[static_cast<int>(Polarity::negative)] = {"dreadful", "horrible", "lousy"};
    return v;
}

std::vector<std::string> synth_vocab_words(const SynthVocab& vocab) {
    std::vector<std::string> words;
    auto push = [&](const std::vector<std::string>& v) { words.insert(words.end(), v.begin(), v.end()); };
    push(vocab.aspects);
    push(vocab.aspect_suffixes);
    push(vocab.linkers);
    push(vocab.fillers);
    for (const auto& s : vocab.sentiment) push(s);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return words;
}

Corpus synth_corpus(int size, const SynthVocab& vocab, uint64_t seed) {
    if (size < 3) throw std::invalid_argument("synth_corpus: size must be at least 3");
    Rng rng(seed);
    std::vector<ParsedSentence> sentences;
    sentences.reserve(size);

    for (int idx = 0; idx < size; ++idx) {
        const int cls = idx % 3; // class-balanced up to rounding
        const auto& pool = vocab.sentiment[cls];
        const std::string senti = pool[rng.uniform_index(pool.size())];
        const std::string aspect = vocab.aspects[rng.uniform_index(vocab.aspects.size())];
        const bool two_word_aspect = rng.uniform() < 0.25;
        const bool pre_filler = rng.uniform() < 0.5;
        const bool post_filler = rng.uniform() < 0.5;
        const int distance = rng.uniform() < 0.5 ? 1 : 2;

        // layout: [pre] aspect [suffix] [linker] sentiment [post]
        ParsedSentence s;
        auto push = [&](const std::string& tok, int head) {
            s.tokens.push_back(tok);
            s.heads.push_back(head);
            return static_cast<int>(s.tokens.size()) - 1;
        };
        int root = -1;
        if (pre_filler) push(vocab.fillers[rng.uniform_index(vocab.fillers.size())], 1);
        const int aspect_start = static_cast<int>(s.tokens.size());
        root = push(aspect, -1);
        if (pre_filler) s.heads[0] = root;
        if (two_word_aspect)
            push(vocab.aspect_suffixes[rng.uniform_index(vocab.aspect_suffixes.size())], root);
        const int aspect_end = static_cast<int>(s.tokens.size());
        int attach = root;
        if (distance == 2)
            attach = push(vocab.linkers[rng.uniform_index(vocab.linkers.size())], root);
        push(senti, attach);
        if (post_filler) push(vocab.fillers[rng.uniform_index(vocab.fillers.size())], root);

        s.aspect_span = Span{aspect_start, aspect_end};
        s.polarity = static_cast<Polarity>(cls);
        sentences.push_back(std::move(s));
    }
    return corpus_from_sentences(std::move(sentences), "synthetic", Split::train);
}

EmbeddingTable synth_embeddings(const SynthVocab& vocab, int dim, uint64_t seed) {
    if (dim <= 0) throw std::invalid_argument("synth_embeddings: dim must be positive");
    EmbeddingTable table;
    table.dim = dim;
    table.oov_seed = seed;
    Rng rng(seed);
    for (const std::string& w : synth_vocab_words(vocab)) {
        std::vector<double> v(dim);
        for (double& c : v) c = rng.uniform(-0.5, 0.5);
        table.vectors.emplace(w, std::move(v));
    }
    return table;
}

} // namespace tdgat
