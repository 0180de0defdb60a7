#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ontorec/csv.hpp"
#include "ontorec/matrix.hpp"

namespace ontorec {

struct RawUser {
    std::string user_id;
    std::string location;
    std::optional<int> age;
};

struct RawBook {
    std::string isbn;
    std::string title;
    std::string author;
    int year = 0;
    std::string publisher;
};

struct RawRating {
    std::string user_id;
    std::string isbn;
    int rating = 0;
};

struct FileParseStats {
    std::string path;
    std::size_t data_rows = 0;
    std::size_t kept = 0;
    std::size_t malformed = 0;
    std::size_t out_of_range = 0;  // ratings outside [0, 10]
};

struct ParseReport {
    FileParseStats users;
    FileParseStats books;
    FileParseStats ratings;

    std::string to_text() const {
        std::ostringstream os;
        auto line = [&os](const FileParseStats& s, const char* name) {
            os << name << ": " << s.path << "\n"
               << "  data rows:    " << s.data_rows << "\n"
               << "  kept:         " << s.kept << "\n"
               << "  malformed:    " << s.malformed << "\n";
            if (s.out_of_range > 0) os << "  out of range: " << s.out_of_range << "\n";
        };
        line(users, "users");
        line(books, "books");
        line(ratings, "ratings");
        return os.str();
    }
};

struct RawRecordSet {
    std::vector<RawUser> users;
    std::vector<RawBook> books;
    std::vector<RawRating> ratings;
    ParseReport report;
};

namespace detail {

inline std::optional<int> parse_int(const std::string& s) {
    int v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return v;
}

enum class Row { kept, malformed, rejected };

/// Reads all data lines of one file (header skipped) and feeds parsed fields
/// to `consume`. Rows classified `rejected` (e.g. out-of-range ratings) are
/// counted separately from malformed ones and do not trip the
/// malformed-majority check.
template <typename Consume>
FileParseStats parse_file(const std::string& path, Consume consume) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    FileParseStats stats;
    stats.path = path;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    while (std::getline(in, line)) {
        line = strip_cr(std::move(line));
        if (line.empty()) continue;
        stats.data_rows++;
        auto fields = split_semicolon_row(line);
        Row row = fields ? consume(*fields) : Row::malformed;
        switch (row) {
            case Row::kept: stats.kept++; break;
            case Row::malformed: stats.malformed++; break;
            case Row::rejected: stats.out_of_range++; break;
        }
    }
    if (stats.data_rows == 0) throw std::runtime_error("no data rows in file: " + path);
    if (stats.malformed * 2 > stats.data_rows)
        throw std::runtime_error("more than half of the rows are malformed in " + path +
                                 ": wrong delimiter or encoding?");
    return stats;
}

}  // namespace detail

/// Parses the three BookCrossing tables (semicolon-separated, quoted fields,
/// Latin-1, one header row). Malformed rows are skipped and counted; the
/// books table's three image-URL columns are dropped.
inline RawRecordSet parse_bookcrossing(const std::string& users_path,
                                       const std::string& books_path,
                                       const std::string& ratings_path) {
    RawRecordSet out;

    out.report.users = detail::parse_file(users_path, [&](const std::vector<std::string>& f) {
        if (f.size() != 3 || f[0].empty()) return detail::Row::malformed;
        RawUser u;
        u.user_id = f[0];
        u.location = f[1];
        if (!f[2].empty() && f[2] != "NULL") u.age = detail::parse_int(f[2]);
        out.users.push_back(std::move(u));
        return detail::Row::kept;
    });

    out.report.books = detail::parse_file(books_path, [&](const std::vector<std::string>& f) {
        // Full dump rows carry 8 columns (the last three are image URLs);
        // URL-less 5-column rows are also accepted.
        if ((f.size() != 5 && f.size() != 8) || f[0].empty()) return detail::Row::malformed;
        RawBook b;
        b.isbn = f[0];
        b.title = f[1];
        b.author = f[2];
        b.year = detail::parse_int(f[3]).value_or(0);
        b.publisher = f[4];
        out.books.push_back(std::move(b));
        return detail::Row::kept;
    });

    out.report.ratings = detail::parse_file(ratings_path, [&](const std::vector<std::string>& f) {
        if (f.size() != 3 || f[0].empty() || f[1].empty()) return detail::Row::malformed;
        auto r = detail::parse_int(f[2]);
        if (!r) return detail::Row::malformed;
        if (*r < 0 || *r > 10) return detail::Row::rejected;
        out.ratings.push_back(RawRating{f[0], f[1], *r});
        return detail::Row::kept;
    });

    return out;
}

struct PreprocessStats {
    std::size_t zero_ratings_removed = 0;
    std::size_t unknown_isbn_removed = 0;
    std::size_t duplicate_pairs_removed = 0;
    std::size_t entries_kept = 0;
    std::size_t users_kept = 0;
    std::size_t items_kept = 0;

    std::string to_text() const {
        std::ostringstream os;
        os << "preprocess:\n"
           << "  zero ratings removed:    " << zero_ratings_removed << "\n"
           << "  unknown-isbn removed:    " << unknown_isbn_removed << "\n"
           << "  duplicate pairs removed: " << duplicate_pairs_removed << "\n"
           << "  entries kept:            " << entries_kept << "\n"
           << "  users kept:              " << users_kept << "\n"
           << "  items kept:              " << items_kept << "\n";
        return os.str();
    }
};

struct IngestResult {
    RatingMatrix matrix;
    PreprocessStats stats;
};

/// Drops zero (implicit) ratings and ratings whose ISBN has no metadata row,
/// collapses duplicate (user, isbn) pairs to the first occurrence, and builds
/// the matrix with rows/columns assigned in lexicographic id order.
inline IngestResult preprocess(const RawRecordSet& raw) {
    std::unordered_set<std::string> known_isbn;
    known_isbn.reserve(raw.books.size());
    for (const RawBook& b : raw.books) known_isbn.insert(b.isbn);

    PreprocessStats stats;
    std::vector<const RawRating*> kept;
    kept.reserve(raw.ratings.size());
    std::set<std::pair<std::string, std::string>> seen;
    for (const RawRating& r : raw.ratings) {
        if (r.rating == 0) {
            stats.zero_ratings_removed++;
            continue;
        }
        if (!known_isbn.count(r.isbn)) {
            stats.unknown_isbn_removed++;
            continue;
        }
        if (!seen.emplace(r.user_id, r.isbn).second) {
            stats.duplicate_pairs_removed++;
            continue;
        }
        kept.push_back(&r);
    }
    if (kept.empty()) throw std::runtime_error("no explicit ratings survive preprocessing");

    std::set<std::string> user_set, item_set;
    for (const RawRating* r : kept) {
        user_set.insert(r->user_id);
        item_set.insert(r->isbn);
    }
    std::vector<std::string> user_ids(user_set.begin(), user_set.end());
    std::vector<std::string> item_ids(item_set.begin(), item_set.end());
    std::unordered_map<std::string, int> urow, icol;
    for (int i = 0; i < static_cast<int>(user_ids.size()); ++i) urow[user_ids[i]] = i;
    for (int i = 0; i < static_cast<int>(item_ids.size()); ++i) icol[item_ids[i]] = i;

    std::vector<Entry> entries;
    entries.reserve(kept.size());
    for (const RawRating* r : kept)
        entries.push_back(Entry{urow[r->user_id], icol[r->isbn],
                                static_cast<double>(r->rating), Provenance::observed});

    stats.entries_kept = entries.size();
    stats.users_kept = user_ids.size();
    stats.items_kept = item_ids.size();
    return IngestResult{RatingMatrix(std::move(user_ids), std::move(item_ids), std::move(entries)),
                        stats};
}

/// Keeps the `top_users` most active rows and `top_items` most rated columns
/// (ties by index), drops rows/columns left empty, and re-indexes densely.
/// The seed is accepted for config compatibility; selection is rank-based
/// and fully deterministic.
inline RatingMatrix subsample(const RatingMatrix& m, int top_users, int top_items,
                              std::uint32_t /*seed*/) {
    if (top_users < 1 || top_users > m.rows() || top_items < 1 || top_items > m.cols())
        throw std::invalid_argument("subsample: counts must lie in [1, m] x [1, n]");

    auto top_by_count = [](const std::vector<int>& counts, int keep) {
        std::vector<int> order(counts.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&counts](int a, int b) { return counts[a] > counts[b]; });
        order.resize(keep);
        return order;
    };

    std::vector<int> row_counts(m.rows(), 0), col_counts(m.cols(), 0);
    for (const Entry& e : m.entries()) {
        row_counts[e.row]++;
        col_counts[e.col]++;
    }
    std::vector<int> keep_rows = top_by_count(row_counts, top_users);
    std::vector<int> keep_cols = top_by_count(col_counts, top_items);

    std::vector<int> row_map(m.rows(), -1), col_map(m.cols(), -1);
    for (int r : keep_rows) row_map[r] = 0;
    for (int c : keep_cols) col_map[c] = 0;

    // Entries surviving the intersection decide which rows/cols remain.
    std::vector<int> live_row(m.rows(), 0), live_col(m.cols(), 0);
    for (const Entry& e : m.entries())
        if (row_map[e.row] == 0 && col_map[e.col] == 0) {
            live_row[e.row] = 1;
            live_col[e.col] = 1;
        }

    std::vector<std::string> user_ids, item_ids;
    int next = 0;
    for (int r = 0; r < m.rows(); ++r) {
        if (live_row[r]) {
            row_map[r] = next++;
            user_ids.push_back(m.user_ids()[r]);
        } else {
            row_map[r] = -1;
        }
    }
    next = 0;
    for (int c = 0; c < m.cols(); ++c) {
        if (live_col[c]) {
            col_map[c] = next++;
            item_ids.push_back(m.item_ids()[c]);
        } else {
            col_map[c] = -1;
        }
    }

    std::vector<Entry> entries;
    for (const Entry& e : m.entries())
        if (row_map[e.row] >= 0 && col_map[e.col] >= 0)
            entries.push_back(Entry{row_map[e.row], col_map[e.col], e.value, e.prov});
    if (entries.empty()) throw std::runtime_error("subsample: no entries survive");

    return RatingMatrix(std::move(user_ids), std::move(item_ids), std::move(entries));
}

/// Column-aligned item metadata for a matrix, with strings transcoded from
/// Latin-1 to UTF-8. Every column must have a metadata row.
struct ItemMeta {
    std::string isbn;
    std::string title;
    std::string author;
    std::string year;
    std::string publisher;
};

inline std::vector<ItemMeta> item_metadata_for(const RatingMatrix& m,
                                               const std::vector<RawBook>& books) {
    std::unordered_map<std::string, const RawBook*> by_isbn;
    by_isbn.reserve(books.size());
    for (const RawBook& b : books) by_isbn.emplace(b.isbn, &b);  // first row wins

    std::vector<ItemMeta> out;
    out.reserve(m.cols());
    for (const std::string& isbn : m.item_ids()) {
        auto it = by_isbn.find(isbn);
        if (it == by_isbn.end())
            throw std::runtime_error("no book metadata for isbn " + isbn);
        const RawBook& b = *it->second;
        out.push_back(ItemMeta{latin1_to_utf8(b.isbn), latin1_to_utf8(b.title),
                               latin1_to_utf8(b.author), std::to_string(b.year),
                               latin1_to_utf8(b.publisher)});
    }
    return out;
}

}  // namespace ontorec
