#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ontorec/matrix.hpp"

namespace ontorec {
namespace nmf {

struct NmfConfig {
    int k = 20;
    int max_iters = 200;
    double rel_tol = 1e-4;
    std::uint32_t seed = 0;
    double epsilon = 1e-12;  // denominator guard

    void validate() const {
        if (k < 1) throw std::invalid_argument("nmf: k < 1");
        if (max_iters < 1) throw std::invalid_argument("nmf: max_iters < 1");
        if (rel_tol <= 0.0) throw std::invalid_argument("nmf: rel_tol <= 0");
        if (epsilon <= 0.0) throw std::invalid_argument("nmf: epsilon <= 0");
    }
};

/// Nonnegative factor pair W (m x k) and H (k x n), both row-major, with the
/// objective trace of the training run.
struct Factorization {
    int rows = 0;
    int cols = 0;
    int k = 0;
    std::vector<double> w;        // rows * k
    std::vector<double> h;        // k * cols
    std::vector<double> history;  // objective at init and after each full update
    std::uint32_t seed = 0;

    double w_at(int r, int l) const { return w[static_cast<std::size_t>(r) * k + l]; }
    double h_at(int l, int c) const { return h[static_cast<std::size_t>(l) * cols + c]; }
};

/// (W H) at one cell.
inline double reconstruct(const Factorization& f, int row, int col) {
    if (row < 0 || row >= f.rows || col < 0 || col >= f.cols)
        throw std::invalid_argument("reconstruct: index out of range");
    const double* wr = f.w.data() + static_cast<std::size_t>(row) * f.k;
    double s = 0.0;
    for (int l = 0; l < f.k; ++l) s += wr[l] * f.h[static_cast<std::size_t>(l) * f.cols + col];
    return s;
}

/// Masked squared loss: 1/2 * sum over entries (a - (WH))^2.
inline double objective(const RatingMatrix& m, const Factorization& f) {
    double s = 0.0;
    for (const Entry& e : m.entries()) {
        double d = e.value - reconstruct(f, e.row, e.col);
        s += d * d;
    }
    return 0.5 * s;
}

/// Multiplicative updates on the masked squared loss:
///   W <- W .* [(M.*A) H^T] ./ [(M.*(WH)) H^T + eps]
///   H <- H .* [W^T (M.*A)] ./ [W^T (M.*(WH)) + eps]
/// with M the 0/1 entry mask. Factors start uniform on (0, 1] scaled by
/// sqrt(mean(A)/k) from the config seed. Stops when the relative objective
/// decrease falls below rel_tol or after max_iters.
inline Factorization train(const RatingMatrix& m, const NmfConfig& cfg) {
    cfg.validate();
    if (m.entry_count() == 0) throw std::invalid_argument("nmf: matrix has no entries");
    if (cfg.k > std::min(m.rows(), m.cols()))
        throw std::invalid_argument("nmf: k exceeds min(m, n)");

    const int rows = m.rows();
    const int cols = m.cols();
    const int k = cfg.k;

    Factorization f;
    f.rows = rows;
    f.cols = cols;
    f.k = k;
    f.seed = cfg.seed;
    f.w.resize(static_cast<std::size_t>(rows) * k);
    f.h.resize(static_cast<std::size_t>(k) * cols);

    std::mt19937 gen(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double scale = std::sqrt(m.mean_value() / static_cast<double>(k));
    for (double& x : f.w) x = (1.0 - unit(gen)) * scale;  // (0, 1] * scale
    for (double& x : f.h) x = (1.0 - unit(gen)) * scale;

    // Column-grouped entry order for the H update.
    const auto& entries = m.entries();
    std::vector<std::size_t> by_col(entries.size());
    {
        std::vector<std::size_t> col_counts(cols + 1, 0);
        for (const Entry& e : entries) col_counts[e.col + 1]++;
        for (int c = 0; c < cols; ++c) col_counts[c + 1] += col_counts[c];
        for (std::size_t i = 0; i < entries.size(); ++i) by_col[col_counts[entries[i].col]++] = i;
    }

    std::vector<double> num(k), den(k);
    auto predict = [&](const Entry& e) {
        const double* wr = f.w.data() + static_cast<std::size_t>(e.row) * k;
        double s = 0.0;
        for (int l = 0; l < k; ++l) s += wr[l] * f.h[static_cast<std::size_t>(l) * cols + e.col];
        return s;
    };

    f.history.push_back(objective(m, f));
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // W rows are independent given H; entries are already row-grouped.
        for (int r = 0; r < rows; ++r) {
            auto row = m.row_entries(r);
            if (row.empty()) continue;
            std::fill(num.begin(), num.end(), 0.0);
            std::fill(den.begin(), den.end(), 0.0);
            for (const Entry& e : row) {
                const double p = predict(e);
                for (int l = 0; l < k; ++l) {
                    const double hv = f.h[static_cast<std::size_t>(l) * cols + e.col];
                    num[l] += e.value * hv;
                    den[l] += p * hv;
                }
            }
            double* wr = f.w.data() + static_cast<std::size_t>(r) * k;
            for (int l = 0; l < k; ++l) wr[l] *= num[l] / (den[l] + cfg.epsilon);
        }

        // H columns, using the updated W.
        std::size_t cpos = 0;
        for (int c = 0; c < cols; ++c) {
            std::fill(num.begin(), num.end(), 0.0);
            std::fill(den.begin(), den.end(), 0.0);
            bool any = false;
            while (cpos < by_col.size() && entries[by_col[cpos]].col == c) {
                const Entry& e = entries[by_col[cpos]];
                const double p = predict(e);
                const double* wr = f.w.data() + static_cast<std::size_t>(e.row) * k;
                for (int l = 0; l < k; ++l) {
                    num[l] += wr[l] * e.value;
                    den[l] += wr[l] * p;
                }
                any = true;
                ++cpos;
            }
            if (!any) continue;
            for (int l = 0; l < k; ++l)
                f.h[static_cast<std::size_t>(l) * cols + c] *= num[l] / (den[l] + cfg.epsilon);
        }

        const double obj = objective(m, f);
        if (!std::isfinite(obj)) throw std::runtime_error("nmf: objective is not finite");
        const double prev = f.history.back();
        f.history.push_back(obj);
        if (prev <= 0.0) break;
        if ((prev - obj) / prev < cfg.rel_tol) break;
    }
    return f;
}

}  // namespace nmf
}  // namespace ontorec
