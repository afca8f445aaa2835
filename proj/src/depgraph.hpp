#ifndef TDGAT_DEPGRAPH_HPP
#define TDGAT_DEPGRAPH_HPP

// Undirected dependency graphs over sentence tokens, with the aspect
// span collapsed into a single meta-node.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tdgat {

enum class Polarity { positive = 0, neutral = 1, negative = 2 };

const char* to_string(Polarity p);
std::optional<Polarity> polarity_from_string(const std::string& s);

// Half-open token range [start, end).
struct Span {
    int start = 0;
    int end = 0;
    int length() const { return end - start; }
};

struct ParsedSentence {
    std::vector<std::string> tokens;
    std::vector<int> heads;           // 0-based head indices, -1 marks the root
    std::optional<Span> aspect_span;
    std::optional<Polarity> polarity; // absent for unlabeled input

    // Enforces the head-structure invariants (and span bounds when set).
    void validate() const;
};

struct DepGraph {
    int node_count = 0;
    std::vector<std::vector<int>> adjacency;         // sorted, deduplicated, no self-entries
    int target_node = -1;                            // -1 only in uncollapsed precursors
    std::vector<std::vector<std::string>> node_words; // meta-node carries several

    void validate() const;
};

// CoNLL-U subset: 10 tab-separated columns, FORM and HEAD consumed,
// '#' comments, multi-word ranges ("3-4") skipped, blank line between
// sentences. aspect_span and polarity are left unset.
std::vector<ParsedSentence> parse_conllu(const std::string& text);

// One JSON object per line: {"tokens": [...], "heads": [...],
// "aspect_span": [s, e), "polarity": "positive"|"neutral"|"negative"}.
// polarity may be omitted for unlabeled input. Errors carry the line
// number and the violated invariant.
std::vector<ParsedSentence> load_jsonl(std::istream& in);

// Edge {i, heads[i]} for every non-root token, then the aspect span is
// collapsed. Warns on stderr when the result is not connected.
DepGraph build_graph(const ParsedSentence& sentence);

// Merges span members into one node at index span.start; its neighbors
// are the union of member neighbor sets minus the span itself. Indices
// above the span shift down.
DepGraph collapse_target(const DepGraph& precursor, Span span);

// adj[i], optionally with i itself appended, sorted ascending.
std::vector<int> neighborhood(const DepGraph& graph, int i, bool self_loop = true);

class Rng;

// Random tree over n nodes with a random target; placeholder words.
DepGraph random_tree_graph(int n, Rng& rng);

} // namespace tdgat

#endif
