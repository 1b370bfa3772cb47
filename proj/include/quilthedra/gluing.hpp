#ifndef QUILTHEDRA_GLUING_HPP
#define QUILTHEDRA_GLUING_HPP

#include <quilthedra/intmat.hpp>
#include <quilthedra/trees.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace quilthedra {

// =========================================================================
// Balanced gluing parameters and stratum codimension
// =========================================================================
//
// Gluing parameters along finite edges are balanced when the product of
// delta(e)^{+-1} along the path between two like-colored vertices equals 1
// (+1 rootward, -1 leafward).  Taking logs, each pair of consecutive
// like-colored vertices contributes an integer relation row r(v) - r(w),
// where r(v) is the 0/1 indicator vector of the root path of v over the
// finite edges.  The codimension of a stratum is the number of finite
// edges minus the rank of these relations; coincident-seam (fused) types
// carry one extra codimension from the vanishing of the seam ratio.

struct GluingCone {
    Tree tree;
    std::vector<std::pair<int, int>> edges;   // columns: finite edges, flat ids
    std::vector<std::pair<int, int>> pairs;   // rows: consecutive like-colored pairs
    std::vector<std::vector<Int>> rows;
};

namespace detail {

// indicator of the finite edges on the path root -> v
inline std::vector<Int> root_path_row(const FlatTree& f,
                                      const std::vector<std::pair<int, int>>& edges,
                                      int v) {
    std::set<std::pair<int, int>> on_path;
    int cur = v;
    while (f.v[cur].parent >= 0) {
        on_path.insert({f.v[cur].parent, cur});
        cur = f.v[cur].parent;
    }
    std::vector<Int> row;
    row.reserve(edges.size());
    for (const auto& e : edges) row.push_back(on_path.count(e) ? 1 : 0);
    return row;
}

} // namespace detail

inline GluingCone balanced_relations(const Tree& t) {
    GluingCone g;
    g.tree = t;
    FlatTree f = flatten(t);
    g.edges = f.finite_edges;
    std::vector<std::vector<int>> classes;
    switch (t.family) {
        case Family::stable: break;
        case Family::colored:
        case Family::seam:
            classes.push_back(f.colored_class(1));
            break;
        case Family::bicolored:
            classes.push_back(f.colored_class(1));
            classes.push_back(f.colored_class(2));
            break;
    }
    for (const auto& cls : classes) {
        for (size_t i = 0; i + 1 < cls.size(); ++i) {
            auto r1 = detail::root_path_row(f, g.edges, cls[i]);
            auto r2 = detail::root_path_row(f, g.edges, cls[i + 1]);
            std::vector<Int> row(r1.size());
            for (size_t j = 0; j < row.size(); ++j) row[j] = r1[j] - r2[j];
            g.pairs.emplace_back(cls[i], cls[i + 1]);
            g.rows.push_back(std::move(row));
        }
    }
    return g;
}

inline int relation_rank(const Tree& t) {
    GluingCone g = balanced_relations(t);
    if (g.rows.empty()) return 0;
    return rank_bareiss(g.rows);
}

inline int stratum_codim(const Tree& t) {
    FlatTree f = flatten(t);
    int codim = static_cast<int>(f.finite_edges.size()) - relation_rank(t);
    // coincident seams impose the additional constraint ratio = 0
    if (flavor(t) == Flavor::fused) codim += 1;
    return codim;
}

inline int top_dim(Family fam, int d, int e = 0) {
    switch (fam) {
        case Family::stable: return d - 2;
        case Family::colored: return d - 1;
        case Family::bicolored: return d;
        case Family::seam: return d + e - 1;
    }
    return 0;
}

inline int face_dim(const Tree& t) {
    return top_dim(t.family, t.d, t.e) - stratum_codim(t);
}

// =========================================================================
// Delay functions (multiplicative, locally constant)
// =========================================================================
//
// Delays are stored multiplicatively: lambda_e in Q_{>0} plays the role of
// exp(tau_e).  Types without biquilted vertices carry the trivial
// assignment lambda = 1 on every edge.  Core edges are the finite edges of
// the subtree spanned by the root and the biquilted vertices.

struct DelayAssignment {
    Tree tree;
    // core finite edges (flat ids) -> multiplier; missing entries mean 1
    std::map<std::pair<int, int>, Rational> lambda;

    Rational get(std::pair<int, int> e) const {
        auto it = lambda.find(e);
        return it == lambda.end() ? Rational(1) : it->second;
    }
};

struct DelayFamily {
    int d = 0;
    std::map<std::string, DelayAssignment> by_type;  // keyed by serialize(tree)
};

namespace detail {

inline VKind designated_kind(Flavor fl) {
    switch (fl) {
        case Flavor::biquilted: return VKind::biquilted;
        case Flavor::fused: return VKind::fused;
        default: return VKind::q1;
    }
}

} // namespace detail

// the marked bubble vertices v_1..v_k, in planar order
inline std::vector<int> designated_vertices(const Tree& t, const FlatTree& f) {
    VKind k = detail::designated_kind(flavor(t));
    std::vector<int> out;
    for (size_t i = 0; i < f.v.size(); ++i)
        if (f.v[i].kind == k) out.push_back(static_cast<int>(i));
    return out;
}

// core vertex set: union of root paths to the designated vertices
inline std::set<int> core_vertices(const Tree& t, const FlatTree& f) {
    std::set<int> core;
    for (int v : designated_vertices(t, f)) {
        int cur = v;
        while (cur >= 0) { core.insert(cur); cur = f.v[cur].parent; }
    }
    return core;
}

inline std::vector<std::pair<int, int>> core_edges(const Tree& t, const FlatTree& f) {
    auto core = core_vertices(t, f);
    std::vector<std::pair<int, int>> out;
    for (const auto& e : f.finite_edges)
        if (core.count(e.first) && core.count(e.second)) out.push_back(e);
    return out;
}

namespace detail {

// planar position (0-based, among biquilted vertices) of the first
// biquilted vertex in the subtree of each vertex; -1 when none
inline std::vector<int> first_biquilted(const FlatTree& f) {
    int n = static_cast<int>(f.v.size());
    std::vector<int> pos(n, -1);
    int count = 0;
    // assign positions to biquilted vertices in planar (id) order, then
    // propagate minima upward (flat ids are DFS preorder, so a backward
    // sweep sees children before parents)
    for (int i = 0; i < n; ++i)
        if (f.v[i].kind == VKind::biquilted) pos[i] = count++;
    for (int i = n - 1; i >= 0; --i)
        for (int c : f.v[i].children)
            if (pos[c] >= 0 && (pos[i] < 0 || pos[c] < pos[i])) pos[i] = pos[c];
    return pos;
}

} // namespace detail

inline DelayAssignment make_delay_assignment(const Tree& t) {
    DelayAssignment a;
    a.tree = t;
    if (flavor(t) != Flavor::biquilted) return a;  // trivial by convention
    FlatTree f = flatten(t);
    auto pos = detail::first_biquilted(f);
    for (const auto& e : core_edges(t, f)) {
        int diff = pos[e.second] - pos[e.first];
        a.lambda[e] = pow(Rational(2), diff);
    }
    return a;
}

inline DelayFamily construct_delays(int d) {
    if (d < 1) throw std::invalid_argument("construct_delays: d must be >= 1");
    DelayFamily fam;
    fam.d = d;
    for (int dd = 1; dd <= d; ++dd)
        for (const auto& t : enumerate_trees(Family::bicolored, dd))
            fam.by_type[serialize(t)] = make_delay_assignment(t);
    return fam;
}

struct DelayReport {
    bool ok = true;
    std::vector<std::string> violations;
    void fail(const std::string& axiom, const Tree& t, std::pair<int, int> e) {
        ok = false;
        violations.push_back(axiom + ": " + to_expression(t) + " edge (" +
                             std::to_string(e.first) + "," + std::to_string(e.second) + ")");
    }
};

namespace detail {

// serialize only the core skeleton of a type (kinds of core vertices,
// planar order of core children); types sharing this must agree on lambdas
inline std::string core_signature(const FlatTree& f, const std::set<int>& core, int v) {
    std::string s(1, static_cast<char>(f.v[v].kind));
    s += "(";
    for (int c : f.v[v].children)
        if (core.count(c)) s += core_signature(f, core, c);
    s += ")";
    return s;
}

inline Tree subtree_as_type(const Tree& t, const FlatTree& f, int v) {
    // rebuild the node from flat data
    std::function<TreeNode(int)> build = [&](int id) {
        TreeNode n;
        n.kind = f.v[id].kind;
        n.label = f.v[id].label;
        n.seam_count = f.v[id].seam_count;
        for (int c : f.v[id].children) n.ch.push_back(build(c));
        return n;
    };
    Tree sub;
    sub.family = t.family;
    sub.root = build(v);
    relabel(sub);
    return sub;
}

} // namespace detail

inline DelayReport check_delay_compatibility(const DelayFamily& fam) {
    DelayReport rep;
    std::map<std::string, std::pair<std::string, std::vector<Rational>>> core_groups;

    for (const auto& [key, a] : fam.by_type) {
        const Tree& t = a.tree;
        FlatTree f = flatten(t);
        Flavor fl = flavor(t);

        // (iv) zero/infinite ratio: trivial delays away from finite-ratio types
        if (fl != Flavor::biquilted) {
            for (const auto& [e, lam] : a.lambda)
                if (lam != Rational(1)) rep.fail("zero/infinite-ratio", t, e);
            continue;
        }

        auto core = core_vertices(t, f);

        // (v) positivity: strictly increasing along planar order at core vertices
        for (int v : core) {
            std::optional<Rational> prev;
            for (int c : f.v[v].children) {
                if (!core.count(c)) continue;
                Rational lam = a.get({v, c});
                if (prev && !(*prev < lam)) rep.fail("positivity", t, {v, c});
                prev = lam;
            }
        }

        // (i) subtree property: restriction to a subtree that is itself a
        // valid type must equal that type's own assignment
        for (size_t v = 1; v < f.v.size(); ++v) {
            if (is_leaf_kind(f.v[v].kind)) continue;
            Tree sub = detail::subtree_as_type(t, f, static_cast<int>(v));
            if (validate(sub)) continue;           // not a standalone type
            if (flavor(sub) != Flavor::biquilted) continue;
            auto it = fam.by_type.find(serialize(sub));
            if (it == fam.by_type.end()) continue;  // beyond the family's range
            // flat ids inside the subtree are the ambient ids shifted by v
            FlatTree fs = flatten(sub);
            for (const auto& e : core_edges(sub, fs)) {
                std::pair<int, int> amb = {e.first + static_cast<int>(v),
                                           e.second + static_cast<int>(v)};
                if (it->second.get(e) != a.get(amb)) rep.fail("subtree", sub, e);
            }
        }

        // (ii) refinement property: contracting a single finite edge e0 of the
        // fine type gives a coarse type whose lambda on each surviving edge
        // must be the fine lambda times the collapsed-chain lambda
        for (const auto& e0 : f.finite_edges) {
            auto res = contract_edge(t, e0.first, e0.second);
            if (!res.ok()) continue;
            const Tree& coarse = *res.tree;
            if (flavor(coarse) != Flavor::biquilted) continue;
            auto it = fam.by_type.find(serialize(coarse));
            if (it == fam.by_type.end()) continue;
            FlatTree fc = flatten(coarse);
            int cid = e0.second;
            // coarse preorder = fine preorder with the contracted child removed
            auto to_fine = [&](int k) { return k < cid ? k : k + 1; };
            for (const auto& e : core_edges(coarse, fc)) {
                int oy = to_fine(e.second);
                int pf = f.v[oy].parent;
                Rational fine = a.get({pf, oy});
                if (pf == cid) fine *= a.get(e0);
                if (it->second.get(e) != fine) rep.fail("refinement", coarse, e);
            }
        }

        // (iii) core property: types sharing the core skeleton share lambdas
        std::string sig = detail::core_signature(f, core, 0);
        std::vector<Rational> lams;
        for (const auto& e : core_edges(t, f)) lams.push_back(a.get(e));
        auto [it2, inserted] = core_groups.try_emplace(sig, key, lams);
        if (!inserted && it2->second.second != lams)
            rep.fail("core", t, {-1, -1});
    }
    return rep;
}

// component i of the delayed evaluation map: ratio_i * prod of lambda along
// the root path of the i-th designated vertex
inline std::vector<Rational> delayed_evaluation(const Tree& t, const DelayAssignment& a,
                                                const std::vector<Rational>& ratios) {
    FlatTree f = flatten(t);
    auto des = designated_vertices(t, f);
    if (ratios.size() != des.size())
        throw std::invalid_argument("delayed_evaluation: need one ratio per marked vertex");
    for (const auto& r : ratios)
        if (!r.is_positive())
            throw std::domain_error("delayed_evaluation: ratios must be positive");
    std::vector<Rational> out;
    for (size_t i = 0; i < des.size(); ++i) {
        Rational prod = ratios[i];
        int cur = des[i];
        while (f.v[cur].parent >= 0) {
            prod *= a.get({f.v[cur].parent, cur});
            cur = f.v[cur].parent;
        }
        out.push_back(prod);
    }
    return out;
}

// regularity surrogate: the "all components equal" condition in log
// coordinates is a linear system in the k ratio logs; report its rank and a
// base point of the solution family
struct DiagonalSolution {
    int rank = 0;
    std::vector<Rational> base;  // ratios with delayed evaluation on the diagonal
};

inline DiagonalSolution delayed_diagonal(const Tree& t, const DelayAssignment& a) {
    FlatTree f = flatten(t);
    auto des = designated_vertices(t, f);
    size_t k = des.size();
    DiagonalSolution sol;
    if (k == 0) return sol;
    // log-coordinate system: u_i + c_i = u_{i+1} + c_{i+1}
    std::vector<std::vector<Int>> rows;
    for (size_t i = 0; i + 1 < k; ++i) {
        std::vector<Int> row(k, 0);
        row[i] = 1;
        row[i + 1] = -1;
        rows.push_back(std::move(row));
    }
    sol.rank = rows.empty() ? 0 : rank_bareiss(rows);
    for (size_t i = 0; i < k; ++i) {
        Rational prod(1);
        int cur = des[i];
        while (f.v[cur].parent >= 0) {
            prod *= a.get({f.v[cur].parent, cur});
            cur = f.v[cur].parent;
        }
        sol.base.push_back(Rational(1) / prod);
    }
    return sol;
}

// =========================================================================
// Formal dimension bookkeeping
// =========================================================================

struct FormalModuliDims {
    std::vector<int> dims;     // per vertex of the configuration
    std::vector<int> bubbles;  // indices of the k marked quilted bubbles
};

inline int formal_dimension(const FormalModuliDims& fd) {
    int total = 1 - static_cast<int>(fd.bubbles.size());
    for (int d : fd.dims) {
        if (d < 0) throw std::invalid_argument("formal_dimension: negative dim");
        total += d;
    }
    return total;
}

// For an isolated (dimension-0) configuration, exactly one of the marked
// bubbles must come from a zero-dimensional moduli space; returns its index
// into `bubbles`, or nullopt if the pattern does not hold.
inline std::optional<size_t> zero_bubble_index(const FormalModuliDims& fd) {
    if (formal_dimension(fd) != 0) return std::nullopt;
    std::optional<size_t> found;
    for (size_t i = 0; i < fd.bubbles.size(); ++i) {
        if (fd.dims.at(fd.bubbles[i]) == 0) {
            if (found) return std::nullopt;  // more than one
            found = i;
        }
    }
    return found;
}

} // namespace quilthedra

#endif // QUILTHEDRA_GLUING_HPP
