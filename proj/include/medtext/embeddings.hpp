#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "medtext/kg.hpp"

namespace medtext {

inline constexpr std::uint64_t kDefaultOovSeed = 0x6d65645f6f6f76ULL;

// Frozen word vectors. Lookups are total: unknown tokens get a deterministic
// pseudo-random vector derived from hash(token, seed).
class EmbeddingTable {
  public:
    explicit EmbeddingTable(int dim, std::uint64_t oov_seed = kDefaultOovSeed);

    int dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    bool contains(const std::string& token) const { return vectors_.contains(token); }

    void insert(std::string token, std::vector<double> vec);

    std::vector<double> embed_word(const std::string& token) const;

    // Mean of embed_word over the tokens of the entity name.
    std::vector<double> embed_entity(const Entity& entity) const;

  private:
    int dim_;
    std::uint64_t oov_seed_;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

// word2vec text format: "<vocab_size> <dim>" header, then one token and dim
// floats per line. Duplicate tokens keep the later vector (warning on stderr).
EmbeddingTable load_embeddings(const std::string& path);
EmbeddingTable parse_embeddings(std::istream& stream);

} // namespace medtext
