#include "medtext/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "medtext/error.hpp"
#include "medtext/rng.hpp"

namespace medtext {

using nlohmann::json;

const char* split_name(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "train";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "validation") return Split::Validation;
    if (name == "test") return Split::Test;
    throw Error(ErrorKind::Parse, "unknown split name: " + name);
}

std::vector<const Document*> Corpus::in_split(Split split) const {
    std::vector<const Document*> out;
    for (const Document& doc : documents) {
        auto it = split_assignment.find(doc.id);
        if (it != split_assignment.end() && it->second == split) {
            out.push_back(&doc);
        }
    }
    return out;
}

Corpus parse_corpus_jsonl(const std::string& text, std::size_t max_tokens) {
    Corpus corpus;
    std::set<std::string> seen;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Parse,
                        "corpus line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!record.is_object() || !record.contains("id") || !record.contains("text") ||
            !record.contains("label") || !record["id"].is_string() ||
            !record["text"].is_string()) {
            throw Error(ErrorKind::Parse, "corpus line " + std::to_string(line_no) +
                                              ": expected {\"id\", \"text\", \"label\"}");
        }
        if (!record["label"].is_number_integer()) {
            throw Error(ErrorKind::InvalidLabel,
                        "corpus line " + std::to_string(line_no) + ": label must be an integer");
        }
        const auto label = record["label"].get<long long>();
        if (label != 0 && label != 1) {
            throw Error(ErrorKind::InvalidLabel,
                        "corpus line " + std::to_string(line_no) + ": label must be 0 or 1, got " +
                            std::to_string(label));
        }
        Document doc;
        doc.id = record["id"].get<std::string>();
        doc.raw_text = record["text"].get<std::string>();
        doc.tokens = tokenize(doc.raw_text, max_tokens);
        doc.label = static_cast<int>(label);
        if (!seen.insert(doc.id).second) {
            throw Error(ErrorKind::DuplicateId, "duplicate document id: " + doc.id);
        }
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

Corpus load_corpus(const std::string& path, std::size_t max_tokens) {
    std::ifstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot open corpus file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_corpus_jsonl(buffer.str(), max_tokens);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const Document& doc : corpus.documents) {
        json record;
        record["id"] = doc.id;
        record["text"] = doc.raw_text;
        record["label"] = doc.label;
        out += record.dump();
        out.push_back('\n');
    }
    return out;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot write corpus file: " + path);
    file << corpus_to_jsonl(corpus);
}

Corpus split_corpus(Corpus corpus, const SplitRatios& ratios, std::uint64_t seed) {
    const double sum = ratios.train + ratios.validation + ratios.test;
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw Error(ErrorKind::InvalidArgument,
                    "split ratios must sum to 1, got " + std::to_string(sum));
    }
    if (ratios.train < 0.0 || ratios.validation < 0.0 || ratios.test < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "split ratios must be non-negative");
    }

    const std::size_t n = corpus.documents.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    // Largest-remainder allocation so each split is within one document of
    // its exact share.
    const double shares[3] = {ratios.train, ratios.validation, ratios.test};
    std::size_t counts[3];
    double remainders[3];
    std::size_t assigned = 0;
    for (int s = 0; s < 3; ++s) {
        const double exact = shares[s] * static_cast<double>(n);
        counts[s] = static_cast<std::size_t>(std::floor(exact));
        remainders[s] = exact - std::floor(exact);
        assigned += counts[s];
    }
    while (assigned < n) {
        int best = 0;
        for (int s = 1; s < 3; ++s) {
            if (remainders[s] > remainders[best]) best = s;
        }
        counts[best] += 1;
        remainders[best] = -1.0;
        ++assigned;
    }

    corpus.split_assignment.clear();
    std::size_t cursor = 0;
    const Split splits[3] = {Split::Train, Split::Validation, Split::Test};
    for (int s = 0; s < 3; ++s) {
        for (std::size_t k = 0; k < counts[s]; ++k) {
            corpus.split_assignment[corpus.documents[order[cursor]].id] = splits[s];
            ++cursor;
        }
    }
    return corpus;
}

Vocabulary build_vocabulary(const Corpus& corpus) {
    Vocabulary vocab;
    for (const Document& doc : corpus.documents) {
        auto it = corpus.split_assignment.find(doc.id);
        if (it == corpus.split_assignment.end() || it->second != Split::Train) continue;
        for (const std::string& token : doc.tokens) {
            if (vocab.index.emplace(token, static_cast<int>(vocab.tokens.size())).second) {
                vocab.tokens.push_back(token);
            }
        }
    }
    return vocab;
}

} // namespace medtext
