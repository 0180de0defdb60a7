#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here is deterministic from explicit seeds and kept separate from the
// library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "ontorec/bookcrossing.hpp"
#include "ontorec/cf.hpp"
#include "ontorec/matrix.hpp"
#include "ontorec/taxonomy.hpp"

namespace testsup {

using namespace ontorec;

inline std::vector<std::string> index_ids(const char* prefix, int n) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (int i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s%04d", prefix, i);
        ids.emplace_back(buf);
    }
    return ids;
}

inline RatingMatrix make_matrix(int rows, int cols,
                                const std::vector<std::tuple<int, int, double>>& cells) {
    std::vector<Entry> entries;
    entries.reserve(cells.size());
    for (auto [r, c, v] : cells) entries.push_back(Entry{r, c, v, Provenance::observed});
    return RatingMatrix(index_ids("u", rows), index_ids("b", cols), std::move(entries));
}

// ---------------------------------------------------------------------------
// Mean-offset prediction fixture. Users u0..u3, items b0..b3:
//
//        b0  b1  b2  b3      mean
//   u0    4   6   .   .       5
//   u1    8   6   4   6       6
//   u2    3   7   5   .       5
//   u3    .   .   2   8       5
//
// Hand-traced cases used across the cf tests and the acceptance suite:
//   u0 with neighborhood [(u1, 1.0)] on b0:        5 + 1*(8-6)/1        = 7
//   u0 with neighborhood [(u2, 0.8)] on b3:        u2 never rated b3   -> 5
//   u0 with [(u1, .5), (u2, .5)] on b0:  5 + (.5*2 + .5*(-2))/1        = 5
// ---------------------------------------------------------------------------
inline RatingMatrix eq2_fixture() {
    return make_matrix(4, 4,
                       {{0, 0, 4}, {0, 1, 6},
                        {1, 0, 8}, {1, 1, 6}, {1, 2, 4}, {1, 3, 6},
                        {2, 0, 3}, {2, 1, 7}, {2, 2, 5},
                        {3, 2, 2}, {3, 3, 8}});
}

/// Brute-force mean-offset predictor, written directly from the formula over
/// a dense copy of the matrix. Independent of the library implementation.
inline double eq2_oracle(const RatingMatrix& m, const std::vector<Neighbor>& neighbors, int user,
                         int item) {
    std::vector<std::vector<double>> dense(m.rows(), std::vector<double>(m.cols(), -1.0));
    for (const Entry& e : m.entries()) dense[e.row][e.col] = e.value;
    auto mean_of = [&dense, &m](int u) {
        double s = 0.0;
        int n = 0;
        for (int c = 0; c < m.cols(); ++c)
            if (dense[u][c] >= 0.0) {
                s += dense[u][c];
                ++n;
            }
        return s / n;
    };
    double num = 0.0, den = 0.0;
    for (const Neighbor& nb : neighbors) {
        if (dense[nb.user][item] < 0.0) continue;
        num += nb.sim * (dense[nb.user][item] - mean_of(nb.user));
        den += nb.sim;
    }
    double p = den < 1e-12 ? mean_of(user) : mean_of(user) + num / den;
    return std::min(10.0, std::max(1.0, p));
}

// ---------------------------------------------------------------------------
// Random rooted trees and a brute-force ancestry oracle.
// ---------------------------------------------------------------------------

/// parent[0] = -1; every other node attaches to a uniformly random earlier
/// node, so depths vary and all shapes occur.
inline std::vector<int> random_parent_list(int n, std::mt19937& gen) {
    std::vector<int> parent(n, -1);
    for (int v = 1; v < n; ++v)
        parent[v] = std::uniform_int_distribution<int>(0, v - 1)(gen);
    return parent;
}

/// Deepest common node of the two root-paths, found by set intersection.
inline int lca_oracle(const std::vector<int>& parent, int a, int b) {
    std::vector<int> path;
    for (int cur = a; cur != -1; cur = parent[cur]) path.push_back(cur);
    std::vector<char> on_path(parent.size(), 0);
    for (int id : path) on_path[id] = 1;
    for (int cur = b; cur != -1; cur = parent[cur])
        if (on_path[cur]) return cur;  // first hit from below = deepest common
    return 0;
}

// ---------------------------------------------------------------------------
// Planted low-rank matrices for factorization tests. Factor entries are
// uniform on (0.5, 1.5); the product is rescaled to peak at 10, which keeps
// every value inside [10/9, 10] for any rank.
// ---------------------------------------------------------------------------

struct Planted {
    RatingMatrix matrix;          // observed cells only
    std::vector<double> truth;    // dense rows*cols product, row-major
    std::vector<std::pair<int, int>> heldout;
    double value_scale = 0.0;     // max - min of the true values
};

inline Planted make_planted(int rows, int cols, int rank, double observe_frac,
                            std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> factor(0.5, 1.5);
    std::vector<double> w(static_cast<std::size_t>(rows) * rank);
    std::vector<double> h(static_cast<std::size_t>(rank) * cols);
    for (double& x : w) x = factor(gen);
    for (double& x : h) x = factor(gen);

    std::vector<double> truth(static_cast<std::size_t>(rows) * cols, 0.0);
    double peak = 0.0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int l = 0; l < rank; ++l) s += w[r * rank + l] * h[l * cols + c];
            truth[static_cast<std::size_t>(r) * cols + c] = s;
            peak = std::max(peak, s);
        }
    double lo = truth[0];
    for (double& v : truth) {
        v *= 10.0 / peak;
        lo = std::min(lo, v);
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Entry> entries;
    std::vector<std::pair<int, int>> heldout;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            // the wrapped diagonal is always observed so no row/col is empty
            bool observe = (c == r % cols) || (r == c % rows) || unit(gen) < observe_frac;
            if (observe)
                entries.push_back(Entry{r, c, truth[static_cast<std::size_t>(r) * cols + c],
                                        Provenance::observed});
            else
                heldout.emplace_back(r, c);
        }

    return Planted{RatingMatrix(index_ids("u", rows), index_ids("b", cols), std::move(entries)),
                   std::move(truth), std::move(heldout), 10.0 - lo};
}

// ---------------------------------------------------------------------------
// Synthetic rating corpus with taxonomy-correlated structure, used when no
// real data dump is on disk. Construction:
//   * each publisher p draws a nonnegative factor b_p;
//   * authors perturb their publisher's factor, items perturb their
//     author's, so item factors correlate exactly along the taxonomy;
//   * user factors are independent; the true score w_u . h_j is mapped
//     affinely onto the 1..10 scale;
//   * each user rates a random subset of items: round(true + gaussian
//     noise), clamped to [1, 10].
// ---------------------------------------------------------------------------

struct SynthConfig {
    int users = 500;
    int items = 1000;
    int publishers = 20;
    int authors = 100;
    int rank = 3;
    int min_ratings = 15;
    int max_ratings = 35;
    double noise_sd = 0.7;
    std::uint32_t seed = 42;
};

struct Synth {
    RatingMatrix matrix;
    std::vector<ItemMeta> items;
    Taxonomy taxonomy;
};

inline Synth make_synth(const SynthConfig& cfg) {
    std::mt19937 gen(cfg.seed);
    std::uniform_real_distribution<double> base(0.2, 1.2);
    std::uniform_real_distribution<double> author_jitter(-0.1, 0.1);
    std::uniform_real_distribution<double> item_jitter(-0.08, 0.08);
    std::uniform_real_distribution<double> user_factor(0.1, 1.1);
    std::normal_distribution<double> noise(0.0, cfg.noise_sd);

    const int k = cfg.rank;
    std::vector<double> pub(static_cast<std::size_t>(cfg.publishers) * k);
    for (double& x : pub) x = base(gen);
    std::vector<double> author(static_cast<std::size_t>(cfg.authors) * k);
    for (int a = 0; a < cfg.authors; ++a)
        for (int l = 0; l < k; ++l)
            author[a * k + l] =
                std::max(0.05, pub[(a % cfg.publishers) * k + l] + author_jitter(gen));
    std::vector<double> item(static_cast<std::size_t>(cfg.items) * k);
    for (int j = 0; j < cfg.items; ++j)
        for (int l = 0; l < k; ++l)
            item[j * k + l] =
                std::max(0.02, author[(j % cfg.authors) * k + l] * (1.0 + item_jitter(gen)));
    std::vector<double> user(static_cast<std::size_t>(cfg.users) * k);
    for (double& x : user) x = user_factor(gen);

    std::vector<double> truth(static_cast<std::size_t>(cfg.users) * cfg.items);
    double lo = 1e300, hi = -1e300;
    for (int u = 0; u < cfg.users; ++u)
        for (int j = 0; j < cfg.items; ++j) {
            double s = 0.0;
            for (int l = 0; l < k; ++l) s += user[u * k + l] * item[j * k + l];
            truth[static_cast<std::size_t>(u) * cfg.items + j] = s;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    for (double& v : truth) v = 1.0 + 9.0 * (v - lo) / (hi - lo);

    std::vector<Entry> entries;
    std::vector<int> cols(cfg.items);
    std::iota(cols.begin(), cols.end(), 0);
    for (int u = 0; u < cfg.users; ++u) {
        int count = std::uniform_int_distribution<int>(cfg.min_ratings, cfg.max_ratings)(gen);
        std::shuffle(cols.begin(), cols.end(), gen);
        std::vector<int> picked(cols.begin(), cols.begin() + count);
        std::sort(picked.begin(), picked.end());
        for (int j : picked) {
            double v = std::round(truth[static_cast<std::size_t>(u) * cfg.items + j] + noise(gen));
            entries.push_back(Entry{u, j, std::min(10.0, std::max(1.0, v)), Provenance::observed});
        }
    }

    std::vector<ItemMeta> meta;
    meta.reserve(cfg.items);
    for (int j = 0; j < cfg.items; ++j) {
        char isbn[32], title[32], auth[32], publisher[32];
        std::snprintf(isbn, sizeof(isbn), "9%09d", j);
        std::snprintf(title, sizeof(title), "Book %04d", j);
        std::snprintf(auth, sizeof(auth), "Author %03d", j % cfg.authors);
        std::snprintf(publisher, sizeof(publisher), "Publisher %02d",
                      (j % cfg.authors) % cfg.publishers);
        meta.push_back(ItemMeta{isbn, title, auth, std::to_string(1980 + j % 40), publisher});
    }

    RatingMatrix matrix(index_ids("u", cfg.users), [&meta] {
        std::vector<std::string> ids;
        ids.reserve(meta.size());
        for (const ItemMeta& it : meta) ids.push_back(it.isbn);
        return ids;
    }(), std::move(entries));
    Taxonomy taxonomy = build_taxonomy(meta, {"publisher", "author"});
    return Synth{std::move(matrix), std::move(meta), std::move(taxonomy)};
}

// ---------------------------------------------------------------------------
// Tiny on-disk corpus in the ingest wire format, for CLI round trips.
// ---------------------------------------------------------------------------

/// Writes users/books/ratings files into `dir` and returns their paths.
/// Contains one malformed rating row, one zero rating, one rating with an
/// unknown ISBN and a Latin-1 byte in a book title.
inline std::tuple<std::string, std::string, std::string> write_tiny_corpus(
    const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [](const std::filesystem::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        out << content;
    };
    std::string users =
        "\"User-ID\";\"Location\";\"Age\"\r\n"
        "\"alice\";\"lisbon, portugal\";\"33\"\r\n"
        "\"bob\";\"porto, portugal\";\"NULL\"\r\n"
        "\"carol\";\"faro; algarve\";\"\"\r\n"
        "\"dave\";\"madrid, spain\";\"41\"\r\n";
    std::string books =
        "\"ISBN\";\"Book-Title\";\"Book-Author\";\"Year-Of-Publication\";\"Publisher\";"
        "\"Image-URL-S\";\"Image-URL-M\";\"Image-URL-L\"\r\n"
        "\"1111\";\"Caf\xE9 Nights\";\"Ann Writer\";\"1999\";\"Alpha Press\";\"u\";\"u\";\"u\"\r\n"
        "\"2222\";\"Deep \"\"Blue\"\" Sea\";\"Ann Writer\";\"2001\";\"Alpha Press\";\"u\";\"u\";\"u\"\r\n"
        "\"3333\";\"Quiet Hills\";\"Ben Poet\";\"2005\";\"Beta House\";\"u\";\"u\";\"u\"\r\n"
        "\"4444\";\"Red Valley\";\"Cara Novel\";\"2010\";\"Beta House\";\"u\";\"u\";\"u\"\r\n";
    std::string ratings =
        "\"User-ID\";\"ISBN\";\"Book-Rating\"\r\n"
        "\"alice\";\"1111\";\"8\"\r\n"
        "\"alice\";\"2222\";\"6\"\r\n"
        "\"alice\";\"3333\";\"7\"\r\n"
        "\"bob\";\"1111\";\"7\"\r\n"
        "\"bob\";\"3333\";\"5\"\r\n"
        "\"bob\";\"4444\";\"6\"\r\n"
        "\"carol\";\"2222\";\"9\"\r\n"
        "\"carol\";\"4444\";\"0\"\r\n"          // implicit rating, dropped
        "\"carol\";\"9999\";\"5\"\r\n"          // unknown isbn, dropped
        "\"dave\";\"4444\"\r\n"                 // malformed: missing field
        "\"dave\";\"1111\";\"4\"\r\n"
        "\"dave\";\"2222\";\"5\"\r\n"
        "\"dave\";\"3333\";\"3\"\r\n";
    auto u = dir / "BX-Users.csv";
    auto b = dir / "BX-Books.csv";
    auto r = dir / "BX-Book-Ratings.csv";
    write(u, users);
    write(b, books);
    write(r, ratings);
    return {u.string(), b.string(), r.string()};
}

}  // namespace testsup
