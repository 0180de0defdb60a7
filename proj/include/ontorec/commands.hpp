#pragma once

#include <filesystem>
#include <iostream>
#include <string>

#include "ontorec/bookcrossing.hpp"
#include "ontorec/config.hpp"
#include "ontorec/evaluate.hpp"
#include "ontorec/io.hpp"
#include "ontorec/taxonomy.hpp"

namespace ontorec {

namespace detail {

inline std::filesystem::path out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct Artifact {
    RatingMatrix matrix;
    std::vector<ItemMeta> items;
    Taxonomy taxonomy;
};

inline Artifact load_artifact(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    auto users = load_users_tsv(dir / "users.tsv");
    auto items = load_items_tsv(dir / "items.tsv");
    std::vector<std::string> isbns;
    isbns.reserve(items.size());
    for (const ItemMeta& it : items) isbns.push_back(it.isbn);
    RatingMatrix m = load_matrix_tsv(dir / "matrix.tsv", std::move(users), isbns);
    Taxonomy t = taxonomy_from_json(nlohmann::json::parse(read_file(dir / "taxonomy.json")),
                                    m.item_ids());
    return Artifact{std::move(m), std::move(items), std::move(t)};
}

}  // namespace detail

/// Parse + preprocess (+ optional subsample), then write the canonical
/// dataset artifact: matrix.tsv, users.tsv, items.tsv, taxonomy.json and
/// ingest_report.txt.
inline void cmd_ingest(const RunConfig& cfg, std::ostream& log = std::cout) {
    RawRecordSet raw = parse_bookcrossing(cfg.users_path, cfg.books_path, cfg.ratings_path);
    IngestResult res = preprocess(raw);

    RatingMatrix matrix = std::move(res.matrix);
    if (cfg.subsample_top_users > 0 || cfg.subsample_top_items > 0) {
        int tu = cfg.subsample_top_users > 0 ? std::min(cfg.subsample_top_users, matrix.rows())
                                             : matrix.rows();
        int ti = cfg.subsample_top_items > 0 ? std::min(cfg.subsample_top_items, matrix.cols())
                                             : matrix.cols();
        matrix = subsample(matrix, tu, ti, cfg.subsample_seed);
    }

    std::vector<ItemMeta> items = item_metadata_for(matrix, raw.books);
    Taxonomy taxonomy = build_taxonomy(items, cfg.hierarchy_fields);

    std::string report = raw.report.to_text() + res.stats.to_text() +
                         "matrix: " + std::to_string(matrix.rows()) + " x " +
                         std::to_string(matrix.cols()) + ", " +
                         std::to_string(matrix.entry_count()) + " entries\n";

    auto dir = detail::out_dir(cfg);
    atomic_write_file(dir / "matrix.tsv", matrix_to_tsv(matrix));
    atomic_write_file(dir / "users.tsv", users_to_tsv(matrix));
    atomic_write_file(dir / "items.tsv", items_to_tsv(items));
    atomic_write_file(dir / "taxonomy.json", taxonomy_to_json(taxonomy).dump(2) + "\n");
    atomic_write_file(dir / "ingest_report.txt", report);
    log << report;
}

/// Rebuild taxonomy.json from the ingested artifact, honoring the configured
/// hierarchy fields.
inline void cmd_taxonomy(const RunConfig& cfg, std::ostream& log = std::cout) {
    std::filesystem::path dir(cfg.output_dir);
    auto items = load_items_tsv(dir / "items.tsv");
    Taxonomy taxonomy = build_taxonomy(items, cfg.hierarchy_fields);
    atomic_write_file(dir / "taxonomy.json", taxonomy_to_json(taxonomy).dump(2) + "\n");
    log << "taxonomy: " << taxonomy.node_count() << " concepts over " << taxonomy.item_count()
        << " items\n";
}

/// Cross-validate the four methods on the ingested artifact, write
/// report.csv, then fit the hybrid model on the full matrix and save its
/// factors for `recommend`.
inline void cmd_evaluate(const RunConfig& cfg, std::ostream& log = std::cout) {
    detail::Artifact art = detail::load_artifact(cfg);

    FoldPlan plan = make_folds(art.matrix, cfg.eval_n_folds, cfg.eval_seed);
    MethodConfigs mc{cfg.densify, cfg.nmf, cfg.cf_neighbors};
    EvalReport report = run_cv(art.matrix, art.taxonomy, plan, mc);

    auto dir = detail::out_dir(cfg);
    atomic_write_file(dir / "report.csv", report.to_csv());
    log << report.summary_table();

    RatingMatrix dense = impute(art.matrix, art.taxonomy, cfg.densify);
    nmf::Factorization model = nmf::train(dense, cfg.nmf);
    save_factorization(model, dir);
    log << "model: rank " << model.k << " factors saved\n";
}

struct Recommendation {
    std::string isbn;
    std::string title;
    double predicted = 0.0;
};

/// Top-n unrated items for one user by hybrid predicted rating, ties by
/// ISBN. Items the user already rated are excluded.
inline std::vector<Recommendation> recommend_for_user(const RunConfig& cfg,
                                                      const std::string& user_id, int n) {
    if (n < 0) throw std::invalid_argument("recommend: n must be >= 0");
    detail::Artifact art = detail::load_artifact(cfg);
    nmf::Factorization model = load_factorization(cfg.output_dir);
    if (model.rows != art.matrix.rows() || model.cols != art.matrix.cols())
        throw std::runtime_error("recommend: model does not match the ingested matrix");

    auto row = art.matrix.user_row(user_id);
    if (!row) throw std::runtime_error("unknown user id: " + user_id);

    std::vector<Recommendation> recs;
    for (int c = 0; c < art.matrix.cols(); ++c) {
        if (art.matrix.has(*row, c)) continue;
        recs.push_back(Recommendation{art.items[c].isbn, art.items[c].title,
                                      clip_rating(nmf::reconstruct(model, *row, c))});
    }
    std::sort(recs.begin(), recs.end(), [](const Recommendation& a, const Recommendation& b) {
        return a.predicted != b.predicted ? a.predicted > b.predicted : a.isbn < b.isbn;
    });
    if (static_cast<int>(recs.size()) > n) recs.resize(n);
    return recs;
}

inline void cmd_recommend(const RunConfig& cfg, const std::string& user_id, int n,
                          std::ostream& out = std::cout) {
    for (const Recommendation& r : recommend_for_user(cfg, user_id, n)) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", r.predicted);
        out << r.isbn << '\t' << r.title << '\t' << buf << '\n';
    }
}

}  // namespace ontorec
