#include "medtext/tokenize.hpp"

#include <cctype>
#include <unordered_set>

namespace medtext {

std::vector<std::string> tokenize(std::string_view text, std::size_t max_tokens) {
    std::vector<std::string> tokens;
    std::string current;
    current.reserve(24);
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            if (tokens.size() == max_tokens) return tokens;
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty() && tokens.size() < max_tokens) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

namespace {

const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an",
        "and", "any", "are", "as", "at", "be", "because", "been", "before",
        "being", "below", "between", "both", "but", "by", "can", "cannot",
        "could", "did", "do", "does", "doing", "down", "during", "each",
        "few", "for", "from", "further", "had", "has", "have", "having",
        "he", "her", "here", "hers", "herself", "him", "himself", "his",
        "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just",
        "me", "more", "most", "my", "myself", "no", "nor", "not", "now",
        "of", "off", "on", "once", "only", "or", "other", "our", "ours",
        "ourselves", "out", "over", "own", "same", "she", "should", "so",
        "some", "such", "than", "that", "the", "their", "theirs", "them",
        "themselves", "then", "there", "these", "they", "this", "those",
        "through", "to", "too", "under", "until", "up", "very", "was", "we",
        "were", "what", "when", "where", "which", "while", "who", "whom",
        "why", "will", "with", "would", "you", "your", "yours", "yourself",
        "yourselves", "s", "t", "d", "ll", "m", "re", "ve", "also", "been",
        "may", "might", "must", "shall", "upon", "whether", "yet", "however",
        "therefore", "thus", "although", "among", "amongst", "anyone",
        "anything", "else", "ever", "every", "everything", "neither",
        "nothing", "per", "since", "something", "via", "within", "without",
    };
    return words;
}

} // namespace

bool is_stopword(const std::string& token) {
    return stopword_set().contains(token);
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

} // namespace medtext
