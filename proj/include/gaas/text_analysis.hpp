#pragma once

// Text feature extraction backing the essay-domain predicate fields. The
// heuristics are deliberately simple and fully declared: n-gram overlap
// against a bundled reference corpus, discourse-marker counts, and a
// claim-without-evidence sentence scan.

#include <set>
#include <string>
#include <vector>

namespace gaas {

struct TextFeatures {
    double word_count{0};
    double paragraph_count{0};
    double ngram_overlap{0};            // fraction of the text's n-grams found in the corpus
    double contrast_marker_count{0};
    double has_opening_marker{0};       // 0/1
    double has_closing_marker{0};       // 0/1
    double unsupported_claim_count{0};  // claim-marker sentences lacking any evidence marker
};

struct TextAnalyzerConfig {
    int ngram_size{8};
    std::vector<std::string> opening_markers{"introduction", "in this essay", "this essay",
                                             "to begin", "firstly"};
    std::vector<std::string> closing_markers{"in conclusion", "to conclude", "in summary",
                                             "ultimately", "overall"};
    std::vector<std::string> contrast_markers{"however",     "on the other hand", "conversely",
                                              "in contrast", "whereas",           "critics argue"};
    std::vector<std::string> claim_markers{"clearly",        "obviously",     "undoubtedly",
                                           "everyone knows", "it is certain", "certainly"};
    std::vector<std::string> evidence_markers{"for example", "for instance", "according to",
                                              "study",       "research",     "data",
                                              "evidence",    "statistics",   "survey"};
};

class TextAnalyzer {
public:
    TextAnalyzer() = default;
    explicit TextAnalyzer(TextAnalyzerConfig cfg) : cfg_(std::move(cfg)) {}

    /// loads reference documents (plagiarism targets); call before analyze
    void add_reference_text(const std::string& text);
    void load_reference_file(const std::string& path);

    TextFeatures analyze(const std::string& text) const;

    const TextAnalyzerConfig& config() const { return cfg_; }

private:
    TextAnalyzerConfig cfg_;
    std::set<std::size_t> reference_ngrams_;  // hashed lowercase word n-grams
};

/// lowercases and strips everything but [a-z0-9] word characters
std::vector<std::string> tokenize_words(const std::string& text);

}  // namespace gaas
