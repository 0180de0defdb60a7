#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ontorec/matrix.hpp"
#include "ontorec/taxonomy.hpp"

namespace ontorec {

struct DensifyConfig {
    double tau = 0.5;       // semantic similarity threshold
    int min_support = 1;    // similar-item ratings required before imputing
    int max_neighbors = 20; // cap on similar items per estimate

    void validate() const {
        if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("densify: tau outside [0, 1]");
        if (min_support < 1) throw std::invalid_argument("densify: min_support < 1");
        if (max_neighbors < min_support)
            throw std::invalid_argument("densify: max_neighbors < min_support");
    }
};

/// Similarity-weighted average of the user's own ratings over items
/// semantically similar to `item` (similarity >= tau, at most max_neighbors,
/// ties by item index). Empty when fewer than min_support items qualify.
/// Also serves as the content-based point predictor.
inline std::optional<double> semantic_estimate(const RatingMatrix& m, const Taxonomy& t,
                                               const DensifyConfig& cfg, int user, int item) {
    struct Cand {
        double sim;
        int col;
        double value;
    };
    std::vector<Cand> cands;
    for (const Entry& e : m.row_entries(user)) {
        if (e.col == item) continue;
        double s = t.item_similarity(item, e.col);
        if (s >= cfg.tau) cands.push_back(Cand{s, e.col, e.value});
    }
    if (static_cast<int>(cands.size()) < cfg.min_support) return std::nullopt;
    auto by_sim = [](const Cand& a, const Cand& b) {
        return a.sim != b.sim ? a.sim > b.sim : a.col < b.col;
    };
    if (static_cast<int>(cands.size()) > cfg.max_neighbors) {
        std::partial_sort(cands.begin(), cands.begin() + cfg.max_neighbors, cands.end(), by_sim);
        cands.resize(cfg.max_neighbors);
    } else {
        std::sort(cands.begin(), cands.end(), by_sim);
    }
    double num = 0.0, den = 0.0;
    for (const Cand& c : cands) {
        num += c.sim * c.value;
        den += c.sim;
    }
    // den > 0 since similarities are strictly positive
    return clip_rating(num / den);
}

/// Fills unobserved cells that pass the support gate with the semantic
/// estimate, flagged `imputed`. Existing entries are copied verbatim.
inline RatingMatrix impute(const RatingMatrix& m, const Taxonomy& t, const DensifyConfig& cfg) {
    cfg.validate();
    if (t.item_count() != m.cols())
        throw std::invalid_argument("impute: matrix and taxonomy item spaces differ");
    for (int c = 0; c < m.cols(); ++c) {
        const std::string& leaf_isbn = t.node(t.leaf_of_item(c)).isbn;
        if (!leaf_isbn.empty() && leaf_isbn != m.item_ids()[c])
            throw std::invalid_argument("impute: matrix and taxonomy item spaces differ");
    }

    std::vector<Entry> entries = m.entries();
    std::vector<char> rated(m.cols(), 0);
    for (int u = 0; u < m.rows(); ++u) {
        auto row = m.row_entries(u);
        if (row.empty()) continue;
        for (const Entry& e : row) rated[e.col] = 1;
        for (int i = 0; i < m.cols(); ++i) {
            if (rated[i]) continue;
            if (auto v = semantic_estimate(m, t, cfg, u, i))
                entries.push_back(Entry{u, i, *v, Provenance::imputed});
        }
        for (const Entry& e : row) rated[e.col] = 0;
    }
    return RatingMatrix(m.user_ids(), m.item_ids(), std::move(entries));
}

/// Observed fraction of the user x item grid.
inline double density(const RatingMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("density: empty grid");
    return static_cast<double>(m.entry_count()) /
           (static_cast<double>(m.rows()) * static_cast<double>(m.cols()));
}

}  // namespace ontorec
