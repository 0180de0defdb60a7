#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ontorec/bookcrossing.hpp"
#include "ontorec/matrix.hpp"
#include "ontorec/nmf.hpp"

namespace ontorec {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Writes to `<path>.tmp` and renames, so readers never see partial files.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// matrix.tsv: `row<TAB>col<TAB>value<TAB>provenance`, one line per entry.
inline std::string matrix_to_tsv(const RatingMatrix& m) {
    std::ostringstream os;
    for (const Entry& e : m.entries())
        os << e.row << '\t' << e.col << '\t' << format_double(e.value) << '\t'
           << provenance_name(e.prov) << '\n';
    return os.str();
}

/// users.tsv: `row<TAB>user_id`.
inline std::string users_to_tsv(const RatingMatrix& m) {
    std::ostringstream os;
    for (int r = 0; r < m.rows(); ++r)
        os << r << '\t' << latin1_to_utf8(m.user_ids()[r]) << '\n';
    return os.str();
}

/// items.tsv: `col<TAB>isbn<TAB>title<TAB>author<TAB>year<TAB>publisher`,
/// UTF-8; feeds both taxonomy construction and recommendation output.
inline std::string items_to_tsv(const std::vector<ItemMeta>& items) {
    std::ostringstream os;
    for (std::size_t c = 0; c < items.size(); ++c) {
        const ItemMeta& it = items[c];
        os << c << '\t' << it.isbn << '\t' << it.title << '\t' << it.author << '\t' << it.year
           << '\t' << it.publisher << '\n';
    }
    return os.str();
}

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace detail

inline std::vector<ItemMeta> load_items_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::vector<ItemMeta> items;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_tabs(line);
        if (f.size() != 6) throw std::runtime_error("bad items.tsv row in " + path.string());
        items.push_back(ItemMeta{f[1], f[2], f[3], f[4], f[5]});
    }
    return items;
}

inline std::vector<std::string> load_users_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::vector<std::string> users;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_tabs(line);
        if (f.size() != 2) throw std::runtime_error("bad users.tsv row in " + path.string());
        users.push_back(f[1]);
    }
    return users;
}

inline RatingMatrix load_matrix_tsv(const std::filesystem::path& path,
                                    std::vector<std::string> user_ids,
                                    std::vector<std::string> item_ids) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::vector<Entry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_tabs(line);
        if (f.size() != 4) throw std::runtime_error("bad matrix.tsv row in " + path.string());
        Entry e;
        e.row = std::stoi(f[0]);
        e.col = std::stoi(f[1]);
        e.value = std::stod(f[2]);
        e.prov = f[3] == "imputed" ? Provenance::imputed : Provenance::observed;
        entries.push_back(e);
    }
    return RatingMatrix(std::move(user_ids), std::move(item_ids), std::move(entries));
}

/// Factor dump: header `rows cols`, then row-major space-separated values.
inline std::string dense_to_text(int rows, int cols, const std::vector<double>& data) {
    std::ostringstream os;
    os << rows << ' ' << cols << '\n';
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c) os << ' ';
            os << format_double(data[static_cast<std::size_t>(r) * cols + c]);
        }
        os << '\n';
    }
    return os.str();
}

inline void load_dense_text(const std::filesystem::path& path, int& rows, int& cols,
                            std::vector<double>& data) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    if (!(in >> rows >> cols) || rows < 1 || cols < 1)
        throw std::runtime_error("bad factor header in " + path.string());
    data.resize(static_cast<std::size_t>(rows) * cols);
    for (double& v : data)
        if (!(in >> v)) throw std::runtime_error("truncated factor file " + path.string());
}

inline void save_factorization(const nmf::Factorization& f, const std::filesystem::path& dir) {
    atomic_write_file(dir / "model_w.txt", dense_to_text(f.rows, f.k, f.w));
    atomic_write_file(dir / "model_h.txt", dense_to_text(f.k, f.cols, f.h));
}

inline nmf::Factorization load_factorization(const std::filesystem::path& dir) {
    nmf::Factorization f;
    int wk = 0, hk = 0;
    load_dense_text(dir / "model_w.txt", f.rows, wk, f.w);
    load_dense_text(dir / "model_h.txt", hk, f.cols, f.h);
    if (wk != hk) throw std::runtime_error("model_w.txt and model_h.txt disagree on rank");
    f.k = wk;
    return f;
}

}  // namespace ontorec
