#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "medtext/corpus.hpp"
#include "medtext/matrix.hpp"

namespace medtext {

struct Entity {
    std::string id;
    std::string name;
    std::vector<std::string> aliases; // lowercase, deduplicated, includes name
    std::string description;
};

// [start, end) token span linked to an entity.
struct EntityMention {
    std::string entity_id;
    std::size_t begin = 0;
    std::size_t end = 0;
};

class KnowledgeGraph {
  public:
    void add_entity(Entity entity);
    void add_edge(const std::string& a, const std::string& b);

    bool has_entity(const std::string& id) const { return entities_.contains(id); }
    const Entity& entity(const std::string& id) const;
    const std::map<std::string, Entity>& entities() const { return entities_; }
    const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }
    const std::vector<std::string>& neighbors(const std::string& id) const;

  private:
    std::map<std::string, Entity> entities_;
    std::set<std::pair<std::string, std::string>> edges_;
    std::map<std::string, std::vector<std::string>> adjacency_;
};

KnowledgeGraph load_kg(const std::string& path);
KnowledgeGraph parse_kg_json(const std::string& text);
std::string kg_to_json(const KnowledgeGraph& kg);
void save_kg(const KnowledgeGraph& kg, const std::string& path);

// Greedy left-to-right longest match of token n-grams against the alias
// dictionary. Built once per KG, reused across documents.
class AliasIndex {
  public:
    explicit AliasIndex(const KnowledgeGraph& kg);

    std::vector<EntityMention> link(const std::vector<std::string>& tokens) const;

  private:
    std::unordered_map<std::string, std::string> alias_to_entity_;
    std::size_t max_alias_tokens_ = 0;
};

std::vector<EntityMention> link_entities(const Document& doc, const KnowledgeGraph& kg);

// Pairwise weights 1/d for BFS distance d in [1, max_depth]; 0 when
// unreachable or beyond max_depth; zero diagonal.
Matrix shortest_path_weights(const std::vector<std::string>& entity_ids,
                             const KnowledgeGraph& kg, int max_depth);

// Jaccard similarity of description token sets; 0 when either is empty.
double description_overlap(const Entity& a, const Entity& b);

struct LinkStats {
    std::size_t n_docs = 0;
    std::size_t total_mentions = 0;
    double mean_mentions_per_doc = 0.0;
    double mean_distinct_entities_per_doc = 0.0;
    double zero_mention_share = 0.0;
};

LinkStats link_stats(const Corpus& corpus, const KnowledgeGraph& kg);

} // namespace medtext
