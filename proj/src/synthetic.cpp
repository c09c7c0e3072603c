#include "medtext/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <vector>

#include "medtext/error.hpp"
#include "medtext/rng.hpp"
#include "medtext/tokenize.hpp"

namespace medtext {

namespace {

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "patient",    "admitted",   "overnight", "ward",     "exam",     "noted",
        "stable",     "daily",      "review",    "labs",     "normal",   "limits",
        "reports",    "mild",       "improved",  "plan",     "continue", "monitor",
        "discharged", "home",       "tolerating", "diet",    "ambulating", "well",
        "followup",   "clinic",     "week",      "course",   "hospital", "findings",
        "history",    "presented",  "evening",   "morning",  "status",   "unchanged",
    };
    return words;
}

std::string entity_word(int index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "cond%03d", index);
    return buf;
}

std::string entity_id(int index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "E%03d", index);
    return buf;
}

std::string doc_id(int index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "d%05d", index);
    return buf;
}

} // namespace

SyntheticBundle generate_synthetic(int n_docs, int n_entities, std::uint64_t seed,
                                   int embedding_dim) {
    if (n_docs < 10) throw Error(ErrorKind::InvalidArgument, "n_docs must be >= 10");
    if (n_entities < 8) throw Error(ErrorKind::InvalidArgument, "n_entities must be >= 8");
    if (embedding_dim < 2) throw Error(ErrorKind::InvalidArgument, "embedding_dim must be >= 2");

    Rng rng(seed);
    SyntheticBundle bundle;
    bundle.embedding_dim = embedding_dim;

    // Entity layout: a risk cluster, a benign cluster, one bridge. Chains keep
    // each cluster connected while inter-cluster distances stay >= 2.
    const int n_core = n_entities - 1;
    const int n_risk = n_core / 2;
    const int n_benign = n_core - n_risk;
    std::vector<std::string> risk_ids, benign_ids;
    for (int i = 0; i < n_risk; ++i) {
        const int index = i;
        Entity e;
        e.id = entity_id(index);
        e.name = entity_word(index) + " syndrome";
        e.aliases = {entity_word(index)};
        e.description = "chronic relapse pattern marker severity " + entity_word(index);
        bundle.kg.add_entity(e);
        risk_ids.push_back(e.id);
    }
    for (int i = 0; i < n_benign; ++i) {
        const int index = n_risk + i;
        Entity e;
        e.id = entity_id(index);
        e.name = entity_word(index) + " syndrome";
        e.aliases = {entity_word(index)};
        e.description = "routine wellness observation baseline " + entity_word(index);
        bundle.kg.add_entity(e);
        benign_ids.push_back(e.id);
    }
    Entity bridge;
    bridge.id = entity_id(n_core);
    bridge.name = entity_word(n_core) + " syndrome";
    bridge.aliases = {entity_word(n_core)};
    bridge.description = "general shared clinical concept";
    bundle.kg.add_entity(bridge);

    for (std::size_t i = 0; i + 1 < risk_ids.size(); ++i) {
        bundle.kg.add_edge(risk_ids[i], risk_ids[i + 1]);
    }
    for (std::size_t i = 0; i + 1 < benign_ids.size(); ++i) {
        bundle.kg.add_edge(benign_ids[i], benign_ids[i + 1]);
    }
    bundle.kg.add_edge(bridge.id, risk_ids.front());
    bundle.kg.add_edge(bridge.id, benign_ids.front());

    // Documents: filler prose with planted cluster aliases. Every label-1
    // document carries aliases of >= 2 distinct risk entities.
    const std::vector<std::string>& filler = filler_words();
    for (int d = 0; d < n_docs; ++d) {
        const int label = d % 2;
        const std::vector<std::string>& pool = label == 1 ? risk_ids : benign_ids;

        std::vector<std::string> tokens;
        const int length = 18 + rng.range_int(0, 11);
        for (int t = 0; t < length; ++t) {
            tokens.push_back(filler[rng.below(filler.size())]);
        }

        const int n_mentions = 2 + rng.range_int(0, 1);
        std::set<std::size_t> chosen;
        while (static_cast<int>(chosen.size()) < n_mentions) {
            chosen.insert(rng.below(pool.size()));
        }
        for (std::size_t pick : chosen) {
            const Entity& entity = bundle.kg.entity(pool[pick]);
            const bool full_name = rng.next_unit() < 0.5;
            const std::vector<std::string> alias_tokens =
                tokenize(full_name ? entity.name : entity.aliases.back());
            const std::size_t at = rng.below(tokens.size() + 1);
            tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), alias_tokens.begin(),
                          alias_tokens.end());
        }

        Document doc;
        doc.id = doc_id(d);
        doc.raw_text = join_tokens(tokens);
        doc.tokens = tokenize(doc.raw_text);
        doc.label = label;
        bundle.corpus.documents.push_back(std::move(doc));
    }

    // Embedding file over every alias word plus the filler vocabulary. Alias
    // words carry a cluster offset in the leading dimensions on top of the
    // noise, so their vectors are separable the way pretrained vectors of
    // related terms would be.
    std::vector<std::string> vocab = filler;
    for (int i = 0; i < n_entities; ++i) vocab.push_back(entity_word(i));
    vocab.push_back("syndrome");

    const int offset_dims = std::min(6, embedding_dim);
    auto cluster_offset = [&](const std::string& word) {
        if (word.rfind("cond", 0) != 0) return 0.0;
        const int index = std::stoi(word.substr(4));
        if (index < n_risk) return 0.5;
        if (index < n_core) return -0.5;
        return 0.0; // bridge
    };

    std::string text =
        std::to_string(vocab.size()) + " " + std::to_string(embedding_dim) + "\n";
    char field[32];
    for (const std::string& word : vocab) {
        text += word;
        const double offset = cluster_offset(word);
        for (int k = 0; k < embedding_dim; ++k) {
            const double value = rng.uniform(-0.5, 0.5) + (k < offset_dims ? offset : 0.0);
            std::snprintf(field, sizeof(field), " %.6f", value);
            text += field;
        }
        text.push_back('\n');
    }
    bundle.embeddings_text = std::move(text);
    return bundle;
}

} // namespace medtext
