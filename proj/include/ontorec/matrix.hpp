#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ontorec {

enum class Provenance : std::uint8_t { observed, imputed };

inline const char* provenance_name(Provenance p) {
    return p == Provenance::observed ? "observed" : "imputed";
}

struct Entry {
    int row = 0;
    int col = 0;
    double value = 0.0;
    Provenance prov = Provenance::observed;
};

/// Sparse user x item rating matrix. Entries are kept sorted by (row, col)
/// and unique; values lie in [1, 10]. Rows and columns map back to the
/// original user ids / ISBNs. Immutable after construction.
class RatingMatrix {
public:
    RatingMatrix(std::vector<std::string> user_ids,
                 std::vector<std::string> item_ids,
                 std::vector<Entry> entries)
        : user_ids_(std::move(user_ids)),
          item_ids_(std::move(item_ids)),
          entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        validate();
        build_indexes();
    }

    int rows() const { return static_cast<int>(user_ids_.size()); }
    int cols() const { return static_cast<int>(item_ids_.size()); }
    std::size_t entry_count() const { return entries_.size(); }

    const std::vector<Entry>& entries() const { return entries_; }
    const std::vector<std::string>& user_ids() const { return user_ids_; }
    const std::vector<std::string>& item_ids() const { return item_ids_; }

    /// Entries of one row, sorted by column.
    std::span<const Entry> row_entries(int row) const {
        return {entries_.data() + row_offsets_[row],
                entries_.data() + row_offsets_[row + 1]};
    }

    std::optional<double> value_at(int row, int col) const {
        auto span = row_entries(row);
        auto it = std::lower_bound(span.begin(), span.end(), col,
                                   [](const Entry& e, int c) { return e.col < c; });
        if (it != span.end() && it->col == col) return it->value;
        return std::nullopt;
    }

    bool has(int row, int col) const { return value_at(row, col).has_value(); }

    std::optional<int> user_row(const std::string& user_id) const {
        auto it = user_to_row_.find(user_id);
        if (it == user_to_row_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<int> item_col(const std::string& isbn) const {
        auto it = item_to_col_.find(isbn);
        if (it == item_to_col_.end()) return std::nullopt;
        return it->second;
    }

    /// Sum and count of all entry values.
    double mean_value() const {
        if (entries_.empty()) throw std::runtime_error("mean_value: empty matrix");
        double s = 0.0;
        for (const Entry& e : entries_) s += e.value;
        return s / static_cast<double>(entries_.size());
    }

private:
    void validate() const {
        const int m = rows();
        const int n = cols();
        const Entry* prev = nullptr;
        for (const Entry& e : entries_) {
            if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= n)
                throw std::invalid_argument("RatingMatrix: entry index out of range");
            if (!std::isfinite(e.value) || e.value < 1.0 || e.value > 10.0)
                throw std::invalid_argument("RatingMatrix: value outside [1, 10]");
            if (prev && prev->row == e.row && prev->col == e.col)
                throw std::invalid_argument("RatingMatrix: duplicate (row, col) entry");
            prev = &e;
        }
    }

    void build_indexes() {
        row_offsets_.assign(rows() + 1, 0);
        for (const Entry& e : entries_) row_offsets_[e.row + 1]++;
        for (int r = 0; r < rows(); ++r) row_offsets_[r + 1] += row_offsets_[r];
        user_to_row_.reserve(user_ids_.size());
        for (int r = 0; r < rows(); ++r) user_to_row_.emplace(user_ids_[r], r);
        item_to_col_.reserve(item_ids_.size());
        for (int c = 0; c < cols(); ++c) item_to_col_.emplace(item_ids_[c], c);
        if (user_to_row_.size() != user_ids_.size())
            throw std::invalid_argument("RatingMatrix: duplicate user id");
        if (item_to_col_.size() != item_ids_.size())
            throw std::invalid_argument("RatingMatrix: duplicate item id");
    }

    std::vector<std::string> user_ids_;
    std::vector<std::string> item_ids_;
    std::vector<Entry> entries_;
    std::vector<std::size_t> row_offsets_;
    std::unordered_map<std::string, int> user_to_row_;
    std::unordered_map<std::string, int> item_to_col_;
};

inline double clip_rating(double v) { return std::min(10.0, std::max(1.0, v)); }

}  // namespace ontorec
