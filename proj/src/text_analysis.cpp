#include "gaas/text_analysis.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "gaas/errors.hpp"

namespace gaas {

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::size_t hash_ngram(const std::vector<std::string>& words, std::size_t pos, int n) {
    std::size_t h = 1469598103934665603ull;
    for (int i = 0; i < n; ++i) {
        for (unsigned char c : words[pos + i]) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;  // token boundary
        h *= 1099511628211ull;
    }
    return h;
}

int count_occurrences(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) return 0;
    int n = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + 1))
        ++n;
    return n;
}

bool contains_any(const std::string& text, const std::vector<std::string>& needles) {
    for (const auto& n : needles)
        if (text.find(n) != std::string::npos) return true;
    return false;
}

}  // namespace

std::vector<std::string> tokenize_words(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            words.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(cur);
    return words;
}

void TextAnalyzer::add_reference_text(const std::string& text) {
    const auto words = tokenize_words(text);
    const int n = cfg_.ngram_size;
    if (static_cast<int>(words.size()) < n) return;
    for (std::size_t i = 0; i + n <= words.size(); ++i)
        reference_ngrams_.insert(hash_ngram(words, i, n));
}

void TextAnalyzer::load_reference_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open reference corpus: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    add_reference_text(ss.str());
}

TextFeatures TextAnalyzer::analyze(const std::string& text) const {
    TextFeatures f;
    const std::string lc = lower(text);
    const auto words = tokenize_words(text);
    f.word_count = static_cast<double>(words.size());

    // paragraphs split on blank lines
    int paragraphs = 0;
    bool in_para = false;
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '\n') {
            std::size_t j = i;
            int breaks = 0;
            while (j < text.size() && (text[j] == '\n' || text[j] == '\r' || text[j] == ' ')) {
                if (text[j] == '\n') ++breaks;
                ++j;
            }
            if (breaks >= 2) in_para = false;
            i = j;
        } else {
            if (!in_para && !std::isspace(static_cast<unsigned char>(text[i]))) {
                ++paragraphs;
                in_para = true;
            }
            ++i;
        }
    }
    f.paragraph_count = paragraphs;

    const int n = cfg_.ngram_size;
    if (static_cast<int>(words.size()) >= n && !reference_ngrams_.empty()) {
        std::size_t total = words.size() - n + 1, hits = 0;
        for (std::size_t i = 0; i + n <= words.size(); ++i)
            if (reference_ngrams_.count(hash_ngram(words, i, n))) ++hits;
        f.ngram_overlap = static_cast<double>(hits) / static_cast<double>(total);
    }

    int contrast = 0;
    for (const auto& m : cfg_.contrast_markers) contrast += count_occurrences(lc, m);
    f.contrast_marker_count = contrast;
    f.has_opening_marker = contains_any(lc, cfg_.opening_markers) ? 1.0 : 0.0;
    f.has_closing_marker = contains_any(lc, cfg_.closing_markers) ? 1.0 : 0.0;

    // sentence scan: a claim-marker sentence with no evidence marker is unsupported
    int unsupported = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= lc.size(); ++i) {
        if (i == lc.size() || lc[i] == '.' || lc[i] == '!' || lc[i] == '?') {
            if (i > start) {
                const std::string sentence = lc.substr(start, i - start);
                if (contains_any(sentence, cfg_.claim_markers) &&
                    !contains_any(sentence, cfg_.evidence_markers))
                    ++unsupported;
            }
            start = i + 1;
        }
    }
    f.unsupported_claim_count = unsupported;
    return f;
}

}  // namespace gaas
