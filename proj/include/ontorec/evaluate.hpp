#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ontorec/cf.hpp"
#include "ontorec/densify.hpp"
#include "ontorec/matrix.hpp"
#include "ontorec/nmf.hpp"
#include "ontorec/taxonomy.hpp"

namespace ontorec {

struct FoldPlan {
    int n_folds = 5;
    std::vector<int> assignment;  // per entry of the matrix; -1 for imputed entries
    std::uint32_t seed = 0;
};

/// Entry-level fold partition over observed entries, balanced to within one
/// entry, deterministic from the seed. Imputed entries are never assigned.
inline FoldPlan make_folds(const RatingMatrix& m, int n_folds, std::uint32_t seed) {
    if (n_folds < 2) throw std::invalid_argument("make_folds: n_folds < 2");
    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.assignment.assign(m.entry_count(), -1);

    std::vector<std::size_t> observed;
    for (std::size_t i = 0; i < m.entry_count(); ++i)
        if (m.entries()[i].prov == Provenance::observed) observed.push_back(i);
    if (observed.size() < static_cast<std::size_t>(n_folds))
        throw std::invalid_argument("make_folds: fewer observed entries than folds");

    std::mt19937 gen(seed);
    std::shuffle(observed.begin(), observed.end(), gen);
    for (std::size_t pos = 0; pos < observed.size(); ++pos)
        plan.assignment[observed[pos]] = static_cast<int>(pos % n_folds);
    return plan;
}

inline double mae(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size() || pred.empty())
        throw std::invalid_argument("mae: empty or mismatched inputs");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - actual[i]);
    return s / static_cast<double>(pred.size());
}

inline double rmse(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size() || pred.empty())
        throw std::invalid_argument("rmse: empty or mismatched inputs");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        s += (pred[i] - actual[i]) * (pred[i] - actual[i]);
    return std::sqrt(s / static_cast<double>(pred.size()));
}

enum class MethodId { cf, cb, cf_nmf, hybrid };

inline constexpr std::array<MethodId, 4> kAllMethods = {MethodId::cf, MethodId::cb,
                                                        MethodId::cf_nmf, MethodId::hybrid};

inline const char* method_name(MethodId m) {
    switch (m) {
        case MethodId::cf: return "CF";
        case MethodId::cb: return "CB";
        case MethodId::cf_nmf: return "CF_NMF";
        case MethodId::hybrid: return "HYBRID";
    }
    return "?";
}

struct MethodConfigs {
    DensifyConfig densify;
    nmf::NmfConfig nmf;
    int cf_neighbors = 30;
};

struct MethodScore {
    double mae = 0.0;
    double rmse = 0.0;
    double wall_time_s = 0.0;
};

namespace detail {

/// Last-resort prediction when a method cannot score a cell: the user's
/// train-set mean, or the global train mean for users with no train entries.
struct Fallback {
    UserMeans means;
    double global_mean;

    explicit Fallback(const RatingMatrix& train)
        : means(compute_user_means(train)), global_mean(train.mean_value()) {}

    double operator()(int user) const {
        return means.defined(user) ? means.mean[user] : global_mean;
    }
};

inline std::vector<double> predict_with_factors(const nmf::Factorization& f,
                                                const Fallback& fb,
                                                std::span<const Entry> test) {
    std::vector<double> pred;
    pred.reserve(test.size());
    for (const Entry& e : test) {
        double v = nmf::reconstruct(f, e.row, e.col);
        pred.push_back(std::isfinite(v) ? clip_rating(v) : clip_rating(fb(e.row)));
    }
    return pred;
}

}  // namespace detail

/// Predictions of one method for the (row, col) cells of `test`, trained on
/// `train` only. Every cell gets exactly one prediction; unpredictable cells
/// fall back to the user (or global) mean so metric denominators stay
/// identical across methods.
inline std::vector<double> predict_method(MethodId method, const RatingMatrix& train,
                                          std::span<const Entry> test, const Taxonomy& taxonomy,
                                          const MethodConfigs& cfgs) {
    detail::Fallback fallback(train);

    std::vector<double> pred;
    pred.reserve(test.size());

    switch (method) {
        case MethodId::cf: {
            // Neighborhoods are built once per distinct test user.
            std::vector<std::unique_ptr<UserNeighborhood>> nbhd(train.rows());
            for (const Entry& e : test) {
                if (!fallback.means.defined(e.row)) {
                    pred.push_back(clip_rating(fallback(e.row)));
                    continue;
                }
                if (!nbhd[e.row])
                    nbhd[e.row] = std::make_unique<UserNeighborhood>(
                        build_neighborhood(train, e.row, cfgs.cf_neighbors));
                pred.push_back(predict_cf(train, fallback.means, *nbhd[e.row], e.col));
            }
            break;
        }
        case MethodId::cb: {
            for (const Entry& e : test) {
                auto v = semantic_estimate(train, taxonomy, cfgs.densify, e.row, e.col);
                pred.push_back(v ? *v : clip_rating(fallback(e.row)));
            }
            break;
        }
        case MethodId::cf_nmf: {
            auto f = nmf::train(train, cfgs.nmf);
            pred = detail::predict_with_factors(f, fallback, test);
            break;
        }
        case MethodId::hybrid: {
            RatingMatrix dense = impute(train, taxonomy, cfgs.densify);
            detail::Fallback dense_fallback(dense);
            auto f = nmf::train(dense, cfgs.nmf);
            pred = detail::predict_with_factors(f, dense_fallback, test);
            break;
        }
    }
    return pred;
}

/// One method on one train/test split, scored against the test values.
inline MethodScore run_method(MethodId method, const RatingMatrix& train,
                              std::span<const Entry> test, const Taxonomy& taxonomy,
                              const MethodConfigs& cfgs) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> pred = predict_method(method, train, test, taxonomy, cfgs);

    std::vector<double> actual;
    actual.reserve(test.size());
    for (const Entry& e : test) actual.push_back(e.value);

    MethodScore score;
    score.mae = mae(pred, actual);
    score.rmse = rmse(pred, actual);
    score.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return score;
}

struct MethodSummary {
    double mae_mean = 0.0;
    double mae_std = 0.0;
    double rmse_mean = 0.0;
    double rmse_std = 0.0;
};

struct EvalReport {
    int n_folds = 0;
    std::array<std::vector<MethodScore>, 4> cells;  // [method][fold]

    const std::vector<MethodScore>& scores(MethodId m) const {
        return cells[static_cast<int>(m)];
    }

    MethodSummary summary(MethodId m) const {
        const auto& s = scores(m);
        MethodSummary out;
        for (const MethodScore& c : s) {
            out.mae_mean += c.mae;
            out.rmse_mean += c.rmse;
        }
        out.mae_mean /= static_cast<double>(s.size());
        out.rmse_mean /= static_cast<double>(s.size());
        if (s.size() > 1) {
            double va = 0.0, vr = 0.0;
            for (const MethodScore& c : s) {
                va += (c.mae - out.mae_mean) * (c.mae - out.mae_mean);
                vr += (c.rmse - out.rmse_mean) * (c.rmse - out.rmse_mean);
            }
            out.mae_std = std::sqrt(va / static_cast<double>(s.size() - 1));
            out.rmse_std = std::sqrt(vr / static_cast<double>(s.size() - 1));
        }
        return out;
    }

    /// CSV with one row per (method, fold) and one mean row per method.
    /// The wall_time_s field is left empty so reruns are byte-identical;
    /// measured times are available via summary_table().
    std::string to_csv() const {
        std::ostringstream os;
        os << "method,fold,mae,rmse,wall_time_s\n";
        auto num = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.10g", v);
            return std::string(buf);
        };
        for (MethodId m : kAllMethods)
            for (int f = 0; f < n_folds; ++f) {
                const MethodScore& c = scores(m)[f];
                os << method_name(m) << ',' << f << ',' << num(c.mae) << ',' << num(c.rmse)
                   << ",\n";
            }
        for (MethodId m : kAllMethods) {
            MethodSummary s = summary(m);
            os << method_name(m) << ",mean," << num(s.mae_mean) << ',' << num(s.rmse_mean)
               << ",\n";
        }
        return os.str();
    }

    /// Human-readable per-method summary with measured wall times.
    std::string summary_table() const {
        std::ostringstream os;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-8s %10s %10s %10s %10s %10s\n", "method", "mae",
                      "mae_std", "rmse", "rmse_std", "wall_s");
        os << buf;
        for (MethodId m : kAllMethods) {
            MethodSummary s = summary(m);
            double wall = 0.0;
            for (const MethodScore& c : scores(m)) wall += c.wall_time_s;
            std::snprintf(buf, sizeof(buf), "%-8s %10.4f %10.4f %10.4f %10.4f %10.2f\n",
                          method_name(m), s.mae_mean, s.mae_std, s.rmse_mean, s.rmse_std, wall);
            os << buf;
        }
        return os.str();
    }
};

/// Train matrix (entries outside fold `f`) and test list (observed entries
/// labeled `f`) for one fold.
inline std::pair<RatingMatrix, std::vector<Entry>> split_fold(const RatingMatrix& m,
                                                              const FoldPlan& plan, int fold) {
    if (plan.assignment.size() != m.entry_count())
        throw std::invalid_argument("split_fold: plan does not match matrix");
    std::vector<Entry> train_entries, test_entries;
    for (std::size_t i = 0; i < m.entry_count(); ++i) {
        if (plan.assignment[i] == fold)
            test_entries.push_back(m.entries()[i]);
        else
            train_entries.push_back(m.entries()[i]);
    }
    return {RatingMatrix(m.user_ids(), m.item_ids(), std::move(train_entries)),
            std::move(test_entries)};
}

/// Full cross-validation over the four methods.
inline EvalReport run_cv(const RatingMatrix& m, const Taxonomy& taxonomy, const FoldPlan& plan,
                         const MethodConfigs& cfgs) {
    EvalReport report;
    report.n_folds = plan.n_folds;
    for (int fold = 0; fold < plan.n_folds; ++fold) {
        auto [train, test] = split_fold(m, plan, fold);
        for (MethodId method : kAllMethods) {
            MethodScore s = run_method(method, train, test, taxonomy, cfgs);
            if (s.rmse + 1e-15 < s.mae)
                throw std::runtime_error("run_cv: rmse < mae, metric implementation broken");
            report.cells[static_cast<int>(method)].push_back(s);
        }
    }
    return report;
}

}  // namespace ontorec
