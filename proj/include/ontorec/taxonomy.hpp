#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ontorec/bookcrossing.hpp"

namespace ontorec {

struct ConceptNode {
    int id = 0;
    std::string label;
    int parent = -1;          // -1 only for the root
    int depth = 1;            // depth(root) = 1
    std::vector<int> children;
    std::string isbn;         // non-empty only for item leaves
};

/// Rooted concept tree with items attached to leaves. Queries are pure;
/// the tree is immutable once built.
class Taxonomy {
public:
    /// Builds from an explicit parent list (parent[i] = -1 marks the root).
    /// `item_leaves` maps item column -> node id and may be empty.
    static Taxonomy from_parent_list(const std::vector<int>& parent,
                                     std::vector<std::string> labels = {},
                                     std::vector<int> item_leaves = {}) {
        const int n = static_cast<int>(parent.size());
        if (n == 0) throw std::invalid_argument("taxonomy: no nodes");
        Taxonomy t;
        t.nodes_.resize(n);
        int root = -1;
        for (int i = 0; i < n; ++i) {
            t.nodes_[i].id = i;
            t.nodes_[i].parent = parent[i];
            t.nodes_[i].label = i < static_cast<int>(labels.size()) ? std::move(labels[i])
                                                                    : "c" + std::to_string(i);
            if (parent[i] == -1) {
                if (root != -1) throw std::invalid_argument("taxonomy: more than one root");
                root = i;
            } else if (parent[i] < 0 || parent[i] >= n) {
                throw std::invalid_argument("taxonomy: parent id out of range");
            } else {
                t.nodes_[parent[i]].children.push_back(i);
            }
        }
        if (root == -1) throw std::invalid_argument("taxonomy: no root");
        t.root_ = root;
        t.compute_depths();
        t.item_leaf_ = std::move(item_leaves);
        for (int leaf : t.item_leaf_) {
            t.check_id(leaf);
            if (!t.nodes_[leaf].children.empty())
                throw std::invalid_argument("taxonomy: mapped concept is not a leaf");
        }
        return t;
    }

    int root() const { return root_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int item_count() const { return static_cast<int>(item_leaf_.size()); }
    const ConceptNode& node(int id) const { check_id(id); return nodes_[id]; }
    int depth(int id) const { check_id(id); return nodes_[id].depth; }

    int leaf_of_item(int item) const {
        if (item < 0 || item >= item_count())
            throw std::invalid_argument("taxonomy: item not mapped to a leaf");
        return item_leaf_[item];
    }

    /// Deepest ancestor-or-self shared by both concepts.
    int nearest_common_parent(int a, int b) const {
        check_id(a);
        check_id(b);
        while (nodes_[a].depth > nodes_[b].depth) a = nodes_[a].parent;
        while (nodes_[b].depth > nodes_[a].depth) b = nodes_[b].parent;
        while (a != b) {
            a = nodes_[a].parent;
            b = nodes_[b].parent;
        }
        return a;
    }

    /// Edges from `a` up to its ancestor `anc`; path_length(a, a) = 0.
    int path_length(int a, int anc) const {
        check_id(a);
        check_id(anc);
        int steps = 0;
        int cur = a;
        while (cur != anc) {
            cur = nodes_[cur].parent;
            if (cur == -1)
                throw std::invalid_argument("path_length: second argument is not an ancestor");
            ++steps;
        }
        return steps;
    }

    /// Concept similarity from the shared-ancestry ratio:
    ///   2 * depth(lca) / (len_a + len_b + 2 * depth(lca))
    /// where len_* are the edge counts up to the nearest common parent.
    /// Always in (0, 1]; exactly 1 iff a == b.
    double sem_similarity(int a, int b) const {
        const int lca = nearest_common_parent(a, b);
        const double d = static_cast<double>(nodes_[lca].depth);
        const double la = static_cast<double>(nodes_[a].depth - nodes_[lca].depth);
        const double lb = static_cast<double>(nodes_[b].depth - nodes_[lca].depth);
        return 2.0 * d / (la + lb + 2.0 * d);
    }

    /// Similarity of two items via their leaf concepts.
    double item_similarity(int item_a, int item_b) const {
        return sem_similarity(leaf_of_item(item_a), leaf_of_item(item_b));
    }

    /// Ignores node ids: same shape, labels, isbns and child order.
    friend bool structurally_equal(const Taxonomy& x, const Taxonomy& y) {
        return equal_subtree(x, x.root_, y, y.root_);
    }

private:
    friend Taxonomy build_taxonomy(std::span<const ItemMeta>, const std::vector<std::string>&);
    friend Taxonomy taxonomy_from_json(const nlohmann::json&, std::span<const std::string>);

    Taxonomy() = default;

    void check_id(int id) const {
        if (id < 0 || id >= node_count())
            throw std::invalid_argument("taxonomy: invalid concept id " + std::to_string(id));
    }

    void compute_depths() {
        // Iterative DFS from the root; also rejects cycles and unreachable nodes.
        std::vector<int> stack{root_};
        nodes_[root_].depth = 1;
        int visited = 0;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            ++visited;
            for (int ch : nodes_[cur].children) {
                nodes_[ch].depth = nodes_[cur].depth + 1;
                stack.push_back(ch);
            }
        }
        if (visited != node_count())
            throw std::invalid_argument("taxonomy: parent relation is not a tree");
    }

    static bool equal_subtree(const Taxonomy& x, int a, const Taxonomy& y, int b) {
        const ConceptNode& na = x.nodes_[a];
        const ConceptNode& nb = y.nodes_[b];
        if (na.label != nb.label || na.isbn != nb.isbn ||
            na.children.size() != nb.children.size())
            return false;
        for (std::size_t i = 0; i < na.children.size(); ++i)
            if (!equal_subtree(x, na.children[i], y, nb.children[i])) return false;
        return true;
    }

    std::vector<ConceptNode> nodes_;
    std::vector<int> item_leaf_;  // item column -> leaf id
    int root_ = 0;
};

/// Builds the concept tree over item metadata: root, one level per hierarchy
/// field, then one leaf per item. Items with equal field values along the
/// same path share the internal node; empty values fall into "UNKNOWN".
/// Duplicate ISBNs collapse to a single leaf.
inline Taxonomy build_taxonomy(std::span<const ItemMeta> items,
                               const std::vector<std::string>& hierarchy_fields) {
    if (items.empty()) throw std::invalid_argument("build_taxonomy: no items");
    if (hierarchy_fields.empty())
        throw std::invalid_argument("build_taxonomy: no hierarchy fields");

    auto field_value = [](const ItemMeta& it, const std::string& field) -> const std::string& {
        if (field == "publisher") return it.publisher;
        if (field == "author") return it.author;
        if (field == "year") return it.year;
        throw std::invalid_argument("unknown hierarchy field: " + field);
    };

    Taxonomy t;
    t.nodes_.push_back(ConceptNode{0, "ROOT", -1, 1, {}, ""});
    t.root_ = 0;
    // child lookup per (parent, label); leaves keyed by isbn
    std::unordered_map<std::string, int> edge;
    std::unordered_map<std::string, int> leaf_by_isbn;

    auto child_of = [&](int parent, const std::string& label, const std::string& isbn) {
        std::string key = std::to_string(parent) + '\x1f' + (isbn.empty() ? label : isbn);
        auto it = edge.find(key);
        if (it != edge.end()) return it->second;
        int id = static_cast<int>(t.nodes_.size());
        t.nodes_.push_back(ConceptNode{id, label, parent, t.nodes_[parent].depth + 1, {}, isbn});
        t.nodes_[parent].children.push_back(id);
        edge.emplace(std::move(key), id);
        return id;
    };

    t.item_leaf_.reserve(items.size());
    for (const ItemMeta& item : items) {
        auto dup = leaf_by_isbn.find(item.isbn);
        if (dup != leaf_by_isbn.end()) {
            t.item_leaf_.push_back(dup->second);
            continue;
        }
        int cur = 0;
        for (const std::string& field : hierarchy_fields) {
            const std::string& v = field_value(item, field);
            cur = child_of(cur, v.empty() ? "UNKNOWN" : v, "");
        }
        int leaf = child_of(cur, item.title.empty() ? item.isbn : item.title, item.isbn);
        leaf_by_isbn.emplace(item.isbn, leaf);
        t.item_leaf_.push_back(leaf);
    }
    return t;
}

/// Nested JSON mirror of the tree: {"label", "children"}, leaves also
/// carry "isbn".
inline nlohmann::json taxonomy_to_json(const Taxonomy& t) {
    // Recursive lambda over node ids.
    auto emit = [&t](auto&& self, int id) -> nlohmann::json {
        const ConceptNode& n = t.node(id);
        nlohmann::json j;
        j["label"] = n.label;
        if (!n.isbn.empty()) j["isbn"] = n.isbn;
        nlohmann::json children = nlohmann::json::array();
        for (int ch : n.children) children.push_back(self(self, ch));
        j["children"] = std::move(children);
        return j;
    };
    return emit(emit, t.root());
}

/// Tabular metadata straight to the hierarchical JSON description.
inline nlohmann::json tabular_to_json(std::span<const ItemMeta> items,
                                      const std::vector<std::string>& hierarchy_fields) {
    return taxonomy_to_json(build_taxonomy(items, hierarchy_fields));
}

/// Rebuilds a taxonomy from its JSON form. `item_isbns` gives the column
/// order of the matrix the tree is used with; every listed ISBN must have a
/// leaf. Pass an empty span for a structure-only tree.
inline Taxonomy taxonomy_from_json(const nlohmann::json& j,
                                   std::span<const std::string> item_isbns = {}) {
    Taxonomy t;
    std::unordered_map<std::string, int> leaf_by_isbn;
    auto build = [&](auto&& self, const nlohmann::json& node, int parent, int depth) -> int {
        if (!node.is_object() || !node.contains("label"))
            throw std::runtime_error("taxonomy json: node without label");
        int id = static_cast<int>(t.nodes_.size());
        ConceptNode n;
        n.id = id;
        n.label = node.at("label").get<std::string>();
        n.parent = parent;
        n.depth = depth;
        if (node.contains("isbn")) n.isbn = node.at("isbn").get<std::string>();
        t.nodes_.push_back(std::move(n));
        if (node.contains("children")) {
            for (const auto& ch : node.at("children")) {
                int cid = self(self, ch, id, depth + 1);
                t.nodes_[id].children.push_back(cid);
            }
        }
        if (!t.nodes_[id].isbn.empty()) {
            if (!t.nodes_[id].children.empty())
                throw std::runtime_error("taxonomy json: isbn on a non-leaf node");
            leaf_by_isbn.emplace(t.nodes_[id].isbn, id);
        }
        return id;
    };
    t.root_ = build(build, j, -1, 1);

    t.item_leaf_.reserve(item_isbns.size());
    for (const std::string& isbn : item_isbns) {
        auto it = leaf_by_isbn.find(isbn);
        if (it == leaf_by_isbn.end())
            throw std::runtime_error("taxonomy json: no leaf for isbn " + isbn);
        t.item_leaf_.push_back(it->second);
    }
    return t;
}

}  // namespace ontorec
