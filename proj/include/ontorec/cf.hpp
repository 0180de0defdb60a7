#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ontorec/matrix.hpp"

namespace ontorec {

/// Per-user average of observed ratings. Rows without entries get NaN;
/// callers must not predict for them.
struct UserMeans {
    std::vector<double> mean;

    bool defined(int user) const { return !std::isnan(mean[user]); }
};

inline UserMeans compute_user_means(const RatingMatrix& m) {
    UserMeans out;
    out.mean.assign(m.rows(), std::numeric_limits<double>::quiet_NaN());
    for (int u = 0; u < m.rows(); ++u) {
        auto row = m.row_entries(u);
        if (row.empty()) continue;
        double s = 0.0;
        for (const Entry& e : row) s += e.value;
        out.mean[u] = s / static_cast<double>(row.size());
    }
    return out;
}

/// Pearson correlation over the items both users rated, each vector centered
/// by its own mean over those items. Zero when fewer than two co-rated items
/// exist or either centered vector has zero norm.
inline double user_similarity(const RatingMatrix& m, int u, int v) {
    if (u < 0 || u >= m.rows() || v < 0 || v >= m.rows())
        throw std::invalid_argument("user_similarity: row out of range");
    auto ru = m.row_entries(u);
    auto rv = m.row_entries(v);
    std::vector<std::pair<double, double>> co;
    std::size_t i = 0, j = 0;
    while (i < ru.size() && j < rv.size()) {
        if (ru[i].col < rv[j].col) {
            ++i;
        } else if (ru[i].col > rv[j].col) {
            ++j;
        } else {
            co.emplace_back(ru[i].value, rv[j].value);
            ++i;
            ++j;
        }
    }
    if (co.size() < 2) return 0.0;
    double mu = 0.0, mv = 0.0;
    for (auto [a, b] : co) {
        mu += a;
        mv += b;
    }
    mu /= static_cast<double>(co.size());
    mv /= static_cast<double>(co.size());
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (auto [a, b] : co) {
        dot += (a - mu) * (b - mv);
        nu += (a - mu) * (a - mu);
        nv += (b - mv) * (b - mv);
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    double r = dot / std::sqrt(nu * nv);
    return std::clamp(r, -1.0, 1.0);
}

struct Neighbor {
    int user = 0;
    double sim = 0.0;
};

struct UserNeighborhood {
    int user = 0;
    std::vector<Neighbor> neighbors;  // positive similarity, sorted descending
};

/// Top-k users by similarity to `u`. Only positive similarities are kept;
/// ties break by row index, so the result is deterministic.
inline UserNeighborhood build_neighborhood(const RatingMatrix& m, int u, int k) {
    if (k < 1) throw std::invalid_argument("build_neighborhood: k < 1");
    UserNeighborhood nb;
    nb.user = u;
    for (int v = 0; v < m.rows(); ++v) {
        if (v == u) continue;
        double s = user_similarity(m, u, v);
        if (s > 0.0) nb.neighbors.push_back(Neighbor{v, s});
    }
    std::sort(nb.neighbors.begin(), nb.neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.sim != b.sim ? a.sim > b.sim : a.user < b.user;
    });
    if (static_cast<int>(nb.neighbors.size()) > k) nb.neighbors.resize(k);
    return nb;
}

/// Mean-offset neighborhood prediction:
///   p(u, b) = mean(u) + sum_v sim(u,v) * (r_v(b) - mean(v)) / sum_v sim(u,v)
/// over neighbors that rated b. Falls back to mean(u) when none did or the
/// similarity mass vanishes. Clipped to [1, 10].
inline double predict_cf(const RatingMatrix& m, const UserMeans& means,
                         const UserNeighborhood& nbhd, int item) {
    if (item < 0 || item >= m.cols()) throw std::invalid_argument("predict_cf: item out of range");
    if (!means.defined(nbhd.user))
        throw std::runtime_error("predict_cf: user has no observed ratings");
    const double base = means.mean[nbhd.user];
    double num = 0.0, den = 0.0;
    for (const Neighbor& nb : nbhd.neighbors) {
        auto r = m.value_at(nb.user, item);
        if (!r) continue;
        num += nb.sim * (*r - means.mean[nb.user]);
        den += nb.sim;
    }
    if (den < 1e-12) return clip_rating(base);
    return clip_rating(base + num / den);
}

}  // namespace ontorec
