#include "medtext/embeddings.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "medtext/error.hpp"
#include "medtext/rng.hpp"
#include "medtext/tokenize.hpp"

namespace medtext {

EmbeddingTable::EmbeddingTable(int dim, std::uint64_t oov_seed)
    : dim_(dim), oov_seed_(oov_seed) {
    if (dim <= 0) throw Error(ErrorKind::InvalidArgument, "embedding dim must be positive");
}

void EmbeddingTable::insert(std::string token, std::vector<double> vec) {
    if (static_cast<int>(vec.size()) != dim_) {
        throw Error(ErrorKind::DimensionMismatch,
                    "vector for '" + token + "' has " + std::to_string(vec.size()) +
                        " components, expected " + std::to_string(dim_));
    }
    vectors_[std::move(token)] = std::move(vec);
}

std::vector<double> EmbeddingTable::embed_word(const std::string& token) const {
    auto it = vectors_.find(token);
    if (it != vectors_.end()) return it->second;
    std::uint64_t state = hash64(token, oov_seed_);
    std::vector<double> vec(static_cast<std::size_t>(dim_));
    for (double& v : vec) {
        const double unit = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        v = -0.1 + 0.2 * unit;
    }
    return vec;
}

std::vector<double> EmbeddingTable::embed_entity(const Entity& entity) const {
    const std::vector<std::string> tokens = tokenize(entity.name);
    if (tokens.empty()) {
        throw Error(ErrorKind::InvalidArgument,
                    "entity " + entity.id + " name tokenizes to nothing");
    }
    std::vector<double> mean(static_cast<std::size_t>(dim_), 0.0);
    for (const std::string& token : tokens) {
        const std::vector<double> vec = embed_word(token);
        for (int i = 0; i < dim_; ++i) mean[static_cast<std::size_t>(i)] += vec[static_cast<std::size_t>(i)];
    }
    const double inv = 1.0 / static_cast<double>(tokens.size());
    for (double& v : mean) v *= inv;
    return mean;
}

EmbeddingTable parse_embeddings(std::istream& stream) {
    std::string header;
    if (!std::getline(stream, header)) {
        throw Error(ErrorKind::Parse, "embedding file is empty");
    }
    std::istringstream head(header);
    long long declared = 0;
    int dim = 0;
    if (!(head >> declared >> dim) || declared < 0 || dim <= 0) {
        throw Error(ErrorKind::Parse, "embedding header must be '<vocab_size> <dim>'");
    }
    EmbeddingTable table(dim);
    std::string line;
    long long read = 0;
    std::size_t line_no = 1;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        std::vector<double> vec;
        vec.reserve(static_cast<std::size_t>(dim));
        double value = 0.0;
        while (fields >> value) vec.push_back(value);
        if (!fields.eof()) {
            throw Error(ErrorKind::Parse,
                        "embedding line " + std::to_string(line_no) + ": unparsable float");
        }
        if (static_cast<int>(vec.size()) != dim) {
            throw Error(ErrorKind::DimensionMismatch,
                        "embedding line " + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " floats, got " + std::to_string(vec.size()));
        }
        if (table.contains(token)) {
            std::cerr << "warning: duplicate embedding token '" << token
                      << "', keeping the later vector\n";
        }
        table.insert(std::move(token), std::move(vec));
        ++read;
        if (read > declared) {
            throw Error(ErrorKind::Parse, "embedding file has more entries than declared");
        }
    }
    if (read != declared) {
        throw Error(ErrorKind::Parse, "embedding file declares " + std::to_string(declared) +
                                          " entries but has " + std::to_string(read));
    }
    return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot open embedding file: " + path);
    return parse_embeddings(file);
}

} // namespace medtext
