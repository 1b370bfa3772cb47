#ifndef QUILTHEDRA_POLYTOPES_HPP
#define QUILTHEDRA_POLYTOPES_HPP

#include <quilthedra/gluing.hpp>
#include <quilthedra/trees.hpp>

#include <map>
#include <string>
#include <vector>

namespace quilthedra {

// =========================================================================
// Face posets of the four polytope families
// =========================================================================

struct FacePoset {
    Family family = Family::stable;
    int d = 0, e = 0;
    int dim = 0;                              // dimension of the top face
    std::vector<Tree> faces;                  // canonical order
    std::vector<int> dims;                    // per face
    std::vector<std::pair<int, int>> covers;  // (lo, hi): lo covered by hi
    bool has_covers = false;
    int top = -1;

    int index_of(const Tree& t) const {
        std::string key = serialize(t);
        for (size_t i = 0; i < faces.size(); ++i)
            if (serialize(faces[i]) == key) return static_cast<int>(i);
        return -1;
    }
};

// Cover relations need all-pairs refinement tests, which is the expensive
// part; f-vectors and Euler sums only need dimensions, so covers are
// optional.
inline FacePoset build_face_poset(Family family, int d, int e = 0,
                                  bool with_covers = true) {
    FacePoset p;
    p.family = family;
    p.d = d;
    p.e = e;
    p.dim = top_dim(family, d, e);
    p.faces = enumerate_trees(family, d, e);
    p.dims.reserve(p.faces.size());
    for (size_t i = 0; i < p.faces.size(); ++i) {
        int dim = face_dim(p.faces[i]);
        if (dim < 0 || dim > p.dim)
            throw std::logic_error("face dimension out of range: " +
                                   to_expression(p.faces[i]));
        p.dims.push_back(dim);
        if (dim == p.dim) {
            if (p.top >= 0) throw std::logic_error("two top faces");
            p.top = static_cast<int>(i);
        }
    }
    if (p.top < 0) throw std::logic_error("no top face");

    if (with_covers) {
        const size_t n = p.faces.size();
        std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                if (p.dims[i] >= p.dims[j]) continue;
                leq[i][j] = refines(p.faces[i], p.faces[j]);
            }
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                if (!leq[i][j]) continue;
                bool cover = true;
                for (size_t k = 0; k < n && cover; ++k)
                    if (leq[i][k] && leq[k][j]) cover = false;
                if (cover) p.covers.emplace_back(static_cast<int>(i),
                                                 static_cast<int>(j));
            }
        p.has_covers = true;
    }
    return p;
}

inline std::vector<long> f_vector(const FacePoset& p) {
    std::vector<long> f(p.dim + 1, 0);
    for (int d : p.dims) ++f[d];
    return f;
}

inline bool euler_check(const FacePoset& p) {
    long sum = 0;
    for (int d : p.dims) sum += (d % 2 == 0) ? 1 : -1;
    return sum == 1;
}

// -------------------------------------------------------------------------
// Facet family tags
// -------------------------------------------------------------------------

inline std::vector<std::string> facet_tags_for(Family f) {
    switch (f) {
        case Family::stable: return {"two-vertex"};
        case Family::colored: return {"unquilted-bubble", "quilted-bubbles"};
        case Family::seam:
            return {"boundary-parenthesis", "seam-parenthesis", "h-product"};
        case Family::bicolored:
            return {"once-quilted-bubbles", "unquilted-bubble",
                    "biquilted-bubbles", "seams-together"};
    }
    return {};
}

// classify a codimension-1 face; throws when no family matches
inline std::string facet_tag(const Tree& t) {
    FlatTree f = flatten(t);
    switch (t.family) {
        case Family::stable:
            if (f.internal().size() == 2) return "two-vertex";
            break;
        case Family::colored:
            if (f.v[0].kind == VKind::unquilted) return "quilted-bubbles";
            if (f.v[0].kind == VKind::quilted) return "unquilted-bubble";
            break;
        case Family::seam: {
            if (f.v[0].kind == VKind::unquilted) return "h-product";
            bool has_sphere = false;
            for (const auto& v : f.v)
                if (v.kind == VKind::sphere) has_sphere = true;
            if (f.v[0].kind == VKind::quilted)
                return has_sphere ? "seam-parenthesis" : "boundary-parenthesis";
            break;
        }
        case Family::bicolored:
            switch (flavor(t)) {
                case Flavor::fused: return "seams-together";
                case Flavor::disjoint: return "once-quilted-bubbles";
                case Flavor::biquilted:
                    if (f.v[0].kind == VKind::biquilted) return "unquilted-bubble";
                    if (f.v[0].kind == VKind::unquilted) return "biquilted-bubbles";
                    break;
                default: break;
            }
            break;
    }
    throw std::logic_error("facet matches no family: " + to_expression(t));
}

inline std::map<std::string, long> facet_families(const FacePoset& p) {
    std::map<std::string, long> out;
    for (const auto& tag : facet_tags_for(p.family)) out[tag] = 0;
    for (size_t i = 0; i < p.faces.size(); ++i)
        if (p.dims[i] == p.dim - 1) ++out.at(facet_tag(p.faces[i]));
    return out;
}

// -------------------------------------------------------------------------
// Forgetful maps
// -------------------------------------------------------------------------

namespace detail {

// delete one labeled leaf, then collapse everything left unstable
inline std::optional<TreeNode> stabilize(const TreeNode& n, VKind del_kind, int del_label) {
    if (n.is_leaf()) {
        if (n.kind == del_kind && n.label == del_label) return std::nullopt;
        return n;
    }
    TreeNode out;
    out.kind = n.kind;
    out.seam_count = 0;
    for (size_t i = 0; i < n.ch.size(); ++i) {
        bool seam_side = (n.kind == VKind::sphere) ||
                         (n.kind == VKind::quilted && static_cast<int>(i) < n.seam_count);
        auto c = stabilize(n.ch[i], del_kind, del_label);
        if (!c) continue;
        // splice unary unquilted vertices and unary spheres into the parent
        while (!c->is_leaf() && c->ch.size() == 1 &&
               (c->kind == VKind::unquilted || c->kind == VKind::sphere)) {
            TreeNode inner = c->ch[0];
            c = inner;
        }
        // drop emptied internal vertices entirely
        if (!c->is_leaf() && c->ch.empty()) continue;
        if (seam_side) ++out.seam_count;
        out.ch.push_back(std::move(*c));
    }
    if (out.ch.empty() && !is_leaf_kind(out.kind)) return std::nullopt;
    return out;
}

} // namespace detail

inline Tree forget_leaf(const Tree& t, VKind del_kind, int del_label) {
    auto r = detail::stabilize(t.root, del_kind, del_label);
    if (!r) throw std::invalid_argument("forgetting below the family's minimum");
    // splice a unary unquilted root
    while (!r->is_leaf() && r->ch.size() == 1 && r->kind == VKind::unquilted)
        r = r->ch[0];
    Tree out;
    out.family = t.family;
    out.root = std::move(*r);
    relabel(out);
    auto err = validate(out);
    if (err) throw std::invalid_argument("forgetting below the family's minimum: " + *err);
    return out;
}

inline Tree forget_marking(const Tree& t, int i) {
    if (i < 1 || i > t.d) throw std::invalid_argument("forget_marking: no such leaf");
    int min_d = t.family == Family::stable ? 2 : 1;
    if (t.d - 1 < min_d)
        throw std::invalid_argument("forgetting below the family's minimum d");
    return forget_leaf(t, VKind::aleaf, i);
}

inline Tree forget_seam(const Tree& t, int j) {
    if (t.family != Family::seam)
        throw std::invalid_argument("forget_seam: seam family only");
    if (j < 1 || j > t.e) throw std::invalid_argument("forget_seam: no such leaf");
    return forget_leaf(t, VKind::tleaf, j);
}

// -------------------------------------------------------------------------
// Ratio-of-radii strata on the bimultiplihedron
// -------------------------------------------------------------------------

enum class RatioStratum { zero, finite, infinite, mixed_boundary };

inline const char* ratio_stratum_name(RatioStratum r) {
    switch (r) {
        case RatioStratum::zero: return "zero";
        case RatioStratum::finite: return "finite";
        case RatioStratum::infinite: return "infinite";
        case RatioStratum::mixed_boundary: return "mixed-boundary";
    }
    return "?";
}

inline RatioStratum ratio_stratum(const Tree& t) {
    if (t.family != Family::bicolored)
        throw std::invalid_argument("ratio_stratum: bicolored family only");
    switch (flavor(t)) {
        case Flavor::fused: return RatioStratum::zero;
        case Flavor::biquilted: return RatioStratum::finite;
        case Flavor::disjoint: return RatioStratum::infinite;
        default: return RatioStratum::mixed_boundary;
    }
}

} // namespace quilthedra

#endif // QUILTHEDRA_POLYTOPES_HPP
