#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ontorec/densify.hpp"
#include "ontorec/nmf.hpp"

namespace ontorec {

/// One run's full configuration, read from a flat `key = value` file with
/// dotted section keys. `#` starts a comment; blank lines are ignored.
/// All randomness flows from the seeds below; there are no clock defaults.
struct RunConfig {
    std::string users_path;    // data.users
    std::string books_path;    // data.books
    std::string ratings_path;  // data.ratings

    int subsample_top_users = 0;  // subsample.top_users; 0 disables
    int subsample_top_items = 0;  // subsample.top_items; 0 disables
    std::uint32_t subsample_seed = 0;

    std::vector<std::string> hierarchy_fields = {"publisher", "author"};

    DensifyConfig densify;
    nmf::NmfConfig nmf;
    int cf_neighbors = 30;  // cf.k_neighbors

    int eval_n_folds = 5;          // eval.n_folds
    std::uint32_t eval_seed = 42;  // eval.seed

    std::string output_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_comma(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

template <typename T>
T number_or_throw(const std::string& key, const std::string& value) {
    T v{};
    if constexpr (std::is_floating_point_v<T>) {
        try {
            std::size_t pos = 0;
            v = static_cast<T>(std::stod(value, &pos));
            if (pos != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw std::runtime_error("config: bad number for " + key + ": '" + value + "'");
        }
    } else {
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || p != value.data() + value.size())
            throw std::runtime_error("config: bad integer for " + key + ": '" + value + "'");
    }
    return v;
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(line_no) +
                                     " is not 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));

        if (key == "data.users") cfg.users_path = value;
        else if (key == "data.books") cfg.books_path = value;
        else if (key == "data.ratings") cfg.ratings_path = value;
        else if (key == "subsample.top_users") cfg.subsample_top_users = detail::number_or_throw<int>(key, value);
        else if (key == "subsample.top_items") cfg.subsample_top_items = detail::number_or_throw<int>(key, value);
        else if (key == "subsample.seed") cfg.subsample_seed = detail::number_or_throw<std::uint32_t>(key, value);
        else if (key == "taxonomy.hierarchy_fields") cfg.hierarchy_fields = detail::split_comma(value);
        else if (key == "densify.tau") cfg.densify.tau = detail::number_or_throw<double>(key, value);
        else if (key == "densify.min_support") cfg.densify.min_support = detail::number_or_throw<int>(key, value);
        else if (key == "densify.max_neighbors") cfg.densify.max_neighbors = detail::number_or_throw<int>(key, value);
        else if (key == "nmf.k") cfg.nmf.k = detail::number_or_throw<int>(key, value);
        else if (key == "nmf.max_iters") cfg.nmf.max_iters = detail::number_or_throw<int>(key, value);
        else if (key == "nmf.rel_tol") cfg.nmf.rel_tol = detail::number_or_throw<double>(key, value);
        else if (key == "nmf.seed") cfg.nmf.seed = detail::number_or_throw<std::uint32_t>(key, value);
        else if (key == "nmf.epsilon") cfg.nmf.epsilon = detail::number_or_throw<double>(key, value);
        else if (key == "cf.k_neighbors") cfg.cf_neighbors = detail::number_or_throw<int>(key, value);
        else if (key == "eval.n_folds") cfg.eval_n_folds = detail::number_or_throw<int>(key, value);
        else if (key == "eval.seed") cfg.eval_seed = detail::number_or_throw<std::uint32_t>(key, value);
        else if (key == "output.dir") cfg.output_dir = value;
        else throw std::runtime_error("config: unknown key '" + key + "'");
    }
    if (cfg.hierarchy_fields.empty())
        throw std::runtime_error("config: taxonomy.hierarchy_fields is empty");
    return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

}  // namespace ontorec
