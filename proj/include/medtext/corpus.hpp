#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "medtext/tokenize.hpp"

namespace medtext {

enum class Split { Train, Validation, Test };

const char* split_name(Split split);
Split split_from_name(const std::string& name);

struct Document {
    std::string id;
    std::string raw_text;
    std::vector<std::string> tokens;
    int label = 0;
};

struct Corpus {
    std::vector<Document> documents;
    std::map<std::string, Split> split_assignment;

    std::vector<const Document*> in_split(Split split) const;
};

// One JSON object per line with fields {"id", "text", "label"}.
Corpus load_corpus(const std::string& path, std::size_t max_tokens = kDefaultMaxTokens);
Corpus parse_corpus_jsonl(const std::string& text, std::size_t max_tokens = kDefaultMaxTokens);
std::string corpus_to_jsonl(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);

struct SplitRatios {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

// Deterministic seeded shuffle; split sizes match the ratios within one
// document (largest-remainder allocation).
Corpus split_corpus(Corpus corpus, const SplitRatios& ratios, std::uint64_t seed);

// Token -> dense index, built from the training split only.
struct Vocabulary {
    std::unordered_map<std::string, int> index;
    std::vector<std::string> tokens;

    std::size_t size() const { return tokens.size(); }
    bool contains(const std::string& token) const { return index.contains(token); }
};

Vocabulary build_vocabulary(const Corpus& corpus);

} // namespace medtext
