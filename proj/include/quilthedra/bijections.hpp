#ifndef QUILTHEDRA_BIJECTIONS_HPP
#define QUILTHEDRA_BIJECTIONS_HPP

#include <quilthedra/polytopes.hpp>

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace quilthedra {

// =========================================================================
// Term families of the algebraic identities vs. tagged polytope facets
// =========================================================================

struct BijectionReport {
    bool ok = true;
    long terms = 0;
    long facets = 0;
    std::vector<std::string> unmatched_terms;   // terms whose tree is not a facet
    std::vector<std::string> duplicate_terms;   // two terms hitting one facet
    std::vector<std::string> unmatched_facets;  // facets no term produced
    std::map<std::string, std::string> assignment;  // term label -> facet expression
};

namespace detail {

inline TreeNode corolla(VKind k, int n, int seam = 0) {
    NodeList ch;
    for (int i = 0; i < seam; ++i) ch.push_back(leaf_t());
    for (int i = 0; i < n; ++i) ch.push_back(leaf_a());
    return mk(k, std::move(ch), seam);
}

inline Tree finish_tree(Family fam, TreeNode root) {
    Tree t;
    t.family = fam;
    t.root = std::move(root);
    relabel(t);
    if (auto err = validate(t))
        throw std::logic_error("term tree invalid: " + *err);
    return t;
}

// leaves a_1..a_n, one inner subtree, then the remaining leaves
inline NodeList around(int before, TreeNode inner, int after) {
    NodeList ch;
    for (int i = 0; i < before; ++i) ch.push_back(leaf_a());
    ch.push_back(std::move(inner));
    for (int i = 0; i < after; ++i) ch.push_back(leaf_a());
    return ch;
}

inline void all_compositions(int d, int min_parts,
                             const std::function<void(const std::vector<int>&)>& cb) {
    std::vector<int> parts;
    std::function<void(int)> rec = [&](int rest) {
        if (rest == 0) {
            if (static_cast<int>(parts.size()) >= min_parts) cb(parts);
            return;
        }
        for (int p = 1; p <= rest; ++p) {
            parts.push_back(p);
            rec(rest - p);
            parts.pop_back();
        }
    };
    rec(d);
}

inline std::string comp_str(const std::vector<int>& parts) {
    std::string s = "(";
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(parts[i]);
    }
    return s + ")";
}

} // namespace detail

// terms of one identity, as (label, facet tree) pairs
inline std::vector<std::pair<std::string, Tree>> identity_terms(
    const std::string& identity, int d, int e = 0) {
    using namespace detail;
    std::vector<std::pair<std::string, Tree>> out;
    if (identity == "assoc") {
        // inner mu^m at position n, excluding the identity term (n,m) = (0,d)
        if (d < 3) throw std::invalid_argument("assoc terms need d >= 3");
        for (int m = 2; m <= d; ++m)
            for (int n = 0; n + m <= d; ++n) {
                if (n == 0 && m == d) continue;
                TreeNode root = mk(VKind::unquilted,
                                   around(n, corolla(VKind::unquilted, m), d - n - m));
                out.emplace_back("mu(" + std::to_string(n) + "," + std::to_string(m) + ")",
                                 finish_tree(Family::stable, std::move(root)));
            }
    } else if (identity == "functor") {
        if (d < 2) throw std::invalid_argument("functor terms need d >= 2");
        // left side: F^{d-j+1}(a.., mu^j(..), ..) with j >= 2
        for (int j = 2; j <= d; ++j)
            for (int i = 0; i + j <= d; ++i) {
                TreeNode root = mk(VKind::quilted,
                                   around(i, corolla(VKind::unquilted, j), d - i - j));
                out.emplace_back("F-mu(" + std::to_string(i) + "," + std::to_string(j) + ")",
                                 finish_tree(Family::colored, std::move(root)));
            }
        // right side: mu^m(F^{i_1},...,F^{i_m}) with m >= 2
        all_compositions(d, 2, [&](const std::vector<int>& parts) {
            NodeList ch;
            for (int p : parts) ch.push_back(corolla(VKind::quilted, p));
            TreeNode root = mk(VKind::unquilted, std::move(ch));
            out.emplace_back("mu-F" + comp_str(parts),
                             finish_tree(Family::colored, std::move(root)));
        });
    } else if (identity == "prenat-mu1") {
        if (e != 1) throw std::invalid_argument("prenat-mu1 terms need e = 1");
        if (d < 1) throw std::invalid_argument("prenat-mu1 terms need d >= 1");
        // mu^m(F_1 blocks, T block, F_2 blocks) with m >= 2; the T block may
        // be empty, the functor blocks may not
        for (int m = 2; m <= d + 1; ++m)
            for (int k = 0; k < m; ++k) {
                std::vector<int> parts;
                std::function<void(int, int)> rec = [&](int rest, int slot) {
                    if (slot == m) {
                        if (rest != 0) return;
                        NodeList ch;
                        for (int j = 0; j < m; ++j)
                            ch.push_back(corolla(VKind::quilted, parts[j],
                                                 j == k ? 1 : 0));
                        TreeNode root = mk(VKind::unquilted, std::move(ch));
                        out.emplace_back("mu-T" + comp_str(parts) + "@" +
                                             std::to_string(k + 1),
                                         finish_tree(Family::seam, std::move(root)));
                        return;
                    }
                    int lo = (slot == k) ? 0 : 1;
                    for (int p = lo; p <= rest; ++p) {
                        parts.push_back(p);
                        rec(rest - p, slot + 1);
                        parts.pop_back();
                    }
                };
                rec(d, 0);
            }
        // T^{d-e'+1}(a.., mu^{e'}(..), ..) with e' >= 2
        for (int ee = 2; ee <= d; ++ee)
            for (int i = 0; i + ee <= d; ++i) {
                NodeList ch;
                ch.push_back(leaf_t());
                for (auto& c : around(i, corolla(VKind::unquilted, ee), d - i - ee))
                    ch.push_back(std::move(c));
                TreeNode root = mk(VKind::quilted, std::move(ch), 1);
                out.emplace_back("T-mu(" + std::to_string(i) + "," + std::to_string(ee) + ")",
                                 finish_tree(Family::seam, std::move(root)));
            }
    } else if (identity == "homotopy") {
        if (d < 1) throw std::invalid_argument("homotopy terms need d >= 1");
        // composite-functor terms: F_1^m(F_2^{i_1},...), m >= 1
        all_compositions(d, 1, [&](const std::vector<int>& parts) {
            NodeList ch;
            for (int p : parts) ch.push_back(corolla(VKind::q2, p));
            TreeNode root = mk(VKind::q1, std::move(ch));
            out.emplace_back("FF" + comp_str(parts),
                             finish_tree(Family::bicolored, std::move(root)));
        });
        // the sharp term: both operations applied at once
        out.emplace_back("sharp",
                         finish_tree(Family::bicolored, corolla(VKind::fused, d)));
        // precomposition with mu^e, e >= 2
        for (int ee = 2; ee <= d; ++ee)
            for (int i = 0; i + ee <= d; ++i) {
                TreeNode root = mk(VKind::biquilted,
                                   around(i, corolla(VKind::unquilted, ee), d - i - ee));
                out.emplace_back("G-mu(" + std::to_string(i) + "," + std::to_string(ee) + ")",
                                 finish_tree(Family::bicolored, std::move(root)));
            }
        // mu^m of biquilted factors, m >= 2
        all_compositions(d, 2, [&](const std::vector<int>& parts) {
            NodeList ch;
            for (int p : parts) ch.push_back(corolla(VKind::biquilted, p));
            TreeNode root = mk(VKind::unquilted, std::move(ch));
            out.emplace_back("mu-G" + comp_str(parts),
                             finish_tree(Family::bicolored, std::move(root)));
        });
    } else {
        throw std::invalid_argument("unknown identity: " + identity);
    }
    return out;
}

inline BijectionReport term_facet_correspondence(const std::string& identity,
                                                 int d, int e = 0) {
    Family fam;
    if (identity == "assoc") fam = Family::stable;
    else if (identity == "functor") fam = Family::colored;
    else if (identity == "prenat-mu1") fam = Family::seam;
    else if (identity == "homotopy") fam = Family::bicolored;
    else throw std::invalid_argument("unknown identity: " + identity);

    auto terms = identity_terms(identity, d, e);
    FacePoset p = build_face_poset(fam, d, e, /*with_covers=*/false);

    std::map<std::string, std::string> facet_keys;  // serialized -> expression
    for (size_t i = 0; i < p.faces.size(); ++i)
        if (p.dims[i] == p.dim - 1)
            facet_keys[serialize(p.faces[i])] = to_expression(p.faces[i]);

    BijectionReport rep;
    rep.terms = static_cast<long>(terms.size());
    rep.facets = static_cast<long>(facet_keys.size());
    std::set<std::string> hit;
    for (const auto& [label, tree] : terms) {
        std::string key = serialize(tree);
        auto it = facet_keys.find(key);
        if (it == facet_keys.end()) {
            rep.ok = false;
            rep.unmatched_terms.push_back(label);
            continue;
        }
        if (!hit.insert(key).second) {
            rep.ok = false;
            rep.duplicate_terms.push_back(label);
            continue;
        }
        rep.assignment[label] = it->second;
    }
    for (const auto& [key, expr] : facet_keys)
        if (!hit.count(key)) {
            rep.ok = false;
            rep.unmatched_facets.push_back(expr);
        }
    return rep;
}

} // namespace quilthedra

#endif // QUILTHEDRA_BIJECTIONS_HPP
