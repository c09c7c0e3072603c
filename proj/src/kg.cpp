#include "medtext/kg.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "medtext/error.hpp"
#include "medtext/tokenize.hpp"

namespace medtext {

using nlohmann::json;

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

void KnowledgeGraph::add_entity(Entity entity) {
    if (entity.id.empty()) {
        throw Error(ErrorKind::Parse, "entity with empty id");
    }
    if (entity.name.empty()) {
        throw Error(ErrorKind::Parse, "entity " + entity.id + " has empty name");
    }
    if (entities_.contains(entity.id)) {
        throw Error(ErrorKind::DuplicateId, "duplicate entity id: " + entity.id);
    }
    std::vector<std::string> normalized;
    std::set<std::string> seen;
    auto push = [&](const std::string& alias) {
        std::string lower = lowercase(alias);
        if (lower.empty()) return;
        if (seen.insert(lower).second) normalized.push_back(std::move(lower));
    };
    push(entity.name);
    for (const std::string& alias : entity.aliases) push(alias);
    entity.aliases = std::move(normalized);
    adjacency_[entity.id];
    entities_.emplace(entity.id, std::move(entity));
}

void KnowledgeGraph::add_edge(const std::string& a, const std::string& b) {
    if (a == b) {
        throw Error(ErrorKind::SelfEdge, "self edge on entity: " + a);
    }
    for (const std::string& id : {a, b}) {
        if (!entities_.contains(id)) {
            throw Error(ErrorKind::UnknownEntity, "edge references unknown entity: " + id);
        }
    }
    auto pair = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    if (edges_.insert(pair).second) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
}

const Entity& KnowledgeGraph::entity(const std::string& id) const {
    auto it = entities_.find(id);
    if (it == entities_.end()) {
        throw Error(ErrorKind::UnknownEntity, "unknown entity id: " + id);
    }
    return it->second;
}

const std::vector<std::string>& KnowledgeGraph::neighbors(const std::string& id) const {
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) {
        throw Error(ErrorKind::UnknownEntity, "unknown entity id: " + id);
    }
    return it->second;
}

KnowledgeGraph parse_kg_json(const std::string& text) {
    try {
        const json root = json::parse(text);
        if (!root.is_object() || !root.contains("entities") || !root.contains("edges")) {
            throw Error(ErrorKind::Parse, "kg json: expected {\"entities\", \"edges\"}");
        }
        KnowledgeGraph kg;
        for (const json& item : root["entities"]) {
            Entity entity;
            if (!item.contains("id") || !item.contains("name")) {
                throw Error(ErrorKind::Parse, "kg entity missing id or name");
            }
            entity.id = item["id"].get<std::string>();
            entity.name = item["name"].get<std::string>();
            if (item.contains("aliases")) {
                entity.aliases = item["aliases"].get<std::vector<std::string>>();
            }
            if (item.contains("description")) {
                entity.description = item["description"].get<std::string>();
            }
            kg.add_entity(std::move(entity));
        }
        for (const json& item : root["edges"]) {
            if (!item.is_array() || item.size() != 2) {
                throw Error(ErrorKind::Parse, "kg edge must be a pair of ids");
            }
            kg.add_edge(item[0].get<std::string>(), item[1].get<std::string>());
        }
        return kg;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("kg json: ") + e.what());
    }
}

KnowledgeGraph load_kg(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot open kg file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_kg_json(buffer.str());
}

std::string kg_to_json(const KnowledgeGraph& kg) {
    json root;
    root["entities"] = json::array();
    for (const auto& [id, entity] : kg.entities()) {
        json item;
        item["id"] = entity.id;
        item["name"] = entity.name;
        item["aliases"] = entity.aliases;
        item["description"] = entity.description;
        root["entities"].push_back(std::move(item));
    }
    root["edges"] = json::array();
    for (const auto& [a, b] : kg.edges()) {
        root["edges"].push_back(json::array({a, b}));
    }
    return root.dump(2) + "\n";
}

void save_kg(const KnowledgeGraph& kg, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot write kg file: " + path);
    file << kg_to_json(kg);
}

AliasIndex::AliasIndex(const KnowledgeGraph& kg) {
    for (const auto& [id, entity] : kg.entities()) {
        for (const std::string& alias : entity.aliases) {
            const std::vector<std::string> tokens = tokenize(alias);
            if (tokens.empty()) continue;
            const std::string key = join_tokens(tokens);
            auto [it, inserted] = alias_to_entity_.emplace(key, id);
            // Same alias on several entities: keep the smallest id so the
            // linker does not depend on load order.
            if (!inserted && id < it->second) it->second = id;
            max_alias_tokens_ = std::max(max_alias_tokens_, tokens.size());
        }
    }
}

std::vector<EntityMention> AliasIndex::link(const std::vector<std::string>& tokens) const {
    std::vector<EntityMention> mentions;
    if (max_alias_tokens_ == 0) return mentions;
    std::size_t pos = 0;
    while (pos < tokens.size()) {
        std::size_t longest = std::min(max_alias_tokens_, tokens.size() - pos);
        bool matched = false;
        for (std::size_t len = longest; len >= 1; --len) {
            std::string key = tokens[pos];
            for (std::size_t k = 1; k < len; ++k) {
                key.push_back(' ');
                key += tokens[pos + k];
            }
            auto it = alias_to_entity_.find(key);
            if (it != alias_to_entity_.end()) {
                mentions.push_back({it->second, pos, pos + len});
                pos += len;
                matched = true;
                break;
            }
        }
        if (!matched) ++pos;
    }
    return mentions;
}

std::vector<EntityMention> link_entities(const Document& doc, const KnowledgeGraph& kg) {
    return AliasIndex(kg).link(doc.tokens);
}

Matrix shortest_path_weights(const std::vector<std::string>& entity_ids,
                             const KnowledgeGraph& kg, int max_depth) {
    const std::size_t n = entity_ids.size();
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < n; ++i) {
        if (!kg.has_entity(entity_ids[i])) {
            throw Error(ErrorKind::UnknownEntity, "unknown entity id: " + entity_ids[i]);
        }
        position.emplace(entity_ids[i], i);
    }

    Matrix weights(n, n);
    for (std::size_t src = 0; src < n; ++src) {
        // BFS truncated at max_depth.
        std::map<std::string, int> dist;
        std::deque<std::string> frontier;
        dist[entity_ids[src]] = 0;
        frontier.push_back(entity_ids[src]);
        while (!frontier.empty()) {
            const std::string node = frontier.front();
            frontier.pop_front();
            const int d = dist[node];
            if (d >= max_depth) continue;
            for (const std::string& next : kg.neighbors(node)) {
                if (dist.emplace(next, d + 1).second) {
                    frontier.push_back(next);
                }
            }
        }
        for (const auto& [node, d] : dist) {
            auto it = position.find(node);
            if (it == position.end() || it->second == src || d < 1) continue;
            weights(src, it->second) = 1.0 / static_cast<double>(d);
        }
    }
    return weights;
}

double description_overlap(const Entity& a, const Entity& b) {
    const std::vector<std::string> ta = tokenize(a.description);
    const std::vector<std::string> tb = tokenize(b.description);
    if (ta.empty() || tb.empty()) return 0.0;
    const std::set<std::string> sa(ta.begin(), ta.end());
    const std::set<std::string> sb(tb.begin(), tb.end());
    std::size_t common = 0;
    for (const std::string& t : sa) {
        if (sb.contains(t)) ++common;
    }
    const std::size_t unions = sa.size() + sb.size() - common;
    return static_cast<double>(common) / static_cast<double>(unions);
}

LinkStats link_stats(const Corpus& corpus, const KnowledgeGraph& kg) {
    LinkStats stats;
    stats.n_docs = corpus.documents.size();
    if (stats.n_docs == 0) return stats;
    const AliasIndex index(kg);
    std::size_t total_distinct = 0;
    std::size_t zero_docs = 0;
    for (const Document& doc : corpus.documents) {
        const std::vector<EntityMention> mentions = index.link(doc.tokens);
        stats.total_mentions += mentions.size();
        std::set<std::string> distinct;
        for (const EntityMention& m : mentions) distinct.insert(m.entity_id);
        total_distinct += distinct.size();
        if (mentions.empty()) ++zero_docs;
    }
    const auto docs = static_cast<double>(stats.n_docs);
    stats.mean_mentions_per_doc = static_cast<double>(stats.total_mentions) / docs;
    stats.mean_distinct_entities_per_doc = static_cast<double>(total_distinct) / docs;
    stats.zero_mention_share = static_cast<double>(zero_docs) / docs;
    return stats;
}

} // namespace medtext
