#ifndef QUILTHEDRA_TREES_HPP
#define QUILTHEDRA_TREES_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace quilthedra {

// =========================================================================
// Combinatorial types: planar rooted trees with labeled leaves
// =========================================================================
//
// One node type covers all four families.  Planarity is encoded by the
// child order; leaf labels are therefore redundant but kept for validation
// and I/O.  Quilted-disk vertices in the seam family carry two ordered
// child lists: the first `seam_count` children live on the seam, the rest
// on the boundary.

enum class Family { stable, colored, bicolored, seam };

enum class VKind : char {
    unquilted = 'u',
    quilted   = 'q',  // colored vertex (multiplihedron) / quilted disk (seam)
    sphere    = 's',  // quilted sphere (seam family)
    q1        = '1',  // bicolored: first colored set only
    q2        = '2',  // bicolored: second colored set only
    biquilted = 'b',  // bicolored: both sets, two circles, free shared ratio
    fused     = 'f',  // bicolored: both sets, coincident circles (ratio zero)
    aleaf     = 'a',
    tleaf     = 't',
};

inline bool is_leaf_kind(VKind k) { return k == VKind::aleaf || k == VKind::tleaf; }
inline bool is_colored_kind(VKind k) {
    return k == VKind::quilted || k == VKind::q1 || k == VKind::q2 ||
           k == VKind::biquilted || k == VKind::fused;
}

struct TreeNode {
    VKind kind = VKind::unquilted;
    int label = 0;       // leaves only, 1-based
    int seam_count = 0;  // quilted vertices: children[0..seam_count) are seam items
    std::vector<TreeNode> ch;

    bool is_leaf() const { return is_leaf_kind(kind); }
};

struct Tree {
    Family family = Family::stable;
    int d = 0;
    int e = 0;
    TreeNode root;
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::stable: return "stable";
        case Family::colored: return "colored";
        case Family::bicolored: return "bicolored";
        case Family::seam: return "seam";
    }
    return "?";
}

inline std::optional<Family> family_from_name(const std::string& s) {
    if (s == "stable") return Family::stable;
    if (s == "colored") return Family::colored;
    if (s == "bicolored") return Family::bicolored;
    if (s == "seam") return Family::seam;
    return std::nullopt;
}

// Biquilted-flavor bookkeeping for the bicolored family.
enum class Flavor { none, disjoint, biquilted, fused };

inline void scan_flavor(const TreeNode& n, bool& has12, bool& hasB, bool& hasF) {
    if (n.kind == VKind::q1 || n.kind == VKind::q2) has12 = true;
    if (n.kind == VKind::biquilted) hasB = true;
    if (n.kind == VKind::fused) hasF = true;
    for (const auto& c : n.ch) scan_flavor(c, has12, hasB, hasF);
}

inline Flavor flavor(const Tree& t) {
    if (t.family != Family::bicolored) return Flavor::none;
    bool has12 = false, hasB = false, hasF = false;
    scan_flavor(t.root, has12, hasB, hasF);
    if (hasB) return Flavor::biquilted;
    if (hasF) return Flavor::fused;
    return Flavor::disjoint;
}

// -------------------------------------------------------------------------
// Canonical serialization (doubles as canonical form: planar DFS, seam-first)
// -------------------------------------------------------------------------

inline void serialize_node(const TreeNode& n, std::string& out) {
    if (n.kind == VKind::aleaf) { out += "a" + std::to_string(n.label); return; }
    if (n.kind == VKind::tleaf) { out += "t" + std::to_string(n.label); return; }
    out += static_cast<char>(n.kind);
    if (n.kind == VKind::quilted && n.seam_count >= 0) {
        out += "[";
        for (int i = 0; i < n.seam_count; ++i) {
            if (i) out += ",";
            serialize_node(n.ch[i], out);
        }
        out += "]";
    }
    out += "(";
    int first = (n.kind == VKind::quilted) ? n.seam_count : 0;
    for (size_t i = first; i < n.ch.size(); ++i) {
        if (static_cast<int>(i) > first) out += ",";
        serialize_node(n.ch[i], out);
    }
    out += ")";
}

inline std::string serialize(const Tree& t) {
    std::string out = family_name(t.family);
    out += ":" + std::to_string(t.d) + ":" + std::to_string(t.e) + ":";
    serialize_node(t.root, out);
    return out;
}

inline bool operator==(const Tree& a, const Tree& b) { return serialize(a) == serialize(b); }
inline bool operator<(const Tree& a, const Tree& b) { return serialize(a) < serialize(b); }

// -------------------------------------------------------------------------
// Validation
// -------------------------------------------------------------------------

namespace detail {

inline void collect_leaves(const TreeNode& n, std::vector<const TreeNode*>& as,
                           std::vector<const TreeNode*>& ts) {
    if (n.kind == VKind::aleaf) { as.push_back(&n); return; }
    if (n.kind == VKind::tleaf) { ts.push_back(&n); return; }
    for (const auto& c : n.ch) collect_leaves(c, as, ts);
}

// counts of colored crossings along root->leaf paths, per class
struct PathCheck {
    bool ok = true;
    std::string err;
    void fail(const std::string& m) { if (ok) { ok = false; err = m; } }
};

} // namespace detail

// Returns an error message, or empty optional when the tree is valid.
inline std::optional<std::string> validate(const Tree& t) {
    using detail::PathCheck;
    PathCheck pc;

    // kinds allowed per family
    std::set<VKind> allowed;
    switch (t.family) {
        case Family::stable: allowed = {VKind::unquilted, VKind::aleaf}; break;
        case Family::colored: allowed = {VKind::unquilted, VKind::quilted, VKind::aleaf}; break;
        case Family::bicolored:
            allowed = {VKind::unquilted, VKind::q1, VKind::q2, VKind::biquilted,
                       VKind::fused, VKind::aleaf};
            break;
        case Family::seam:
            allowed = {VKind::unquilted, VKind::quilted, VKind::sphere,
                       VKind::aleaf, VKind::tleaf};
            break;
    }

    bool hasB = false, hasF = false, has12 = false;

    std::function<void(const TreeNode&, bool)> structural =
        [&](const TreeNode& n, bool on_seam) {
        if (!allowed.count(n.kind)) { pc.fail("vertex kind not allowed in family"); return; }
        if (n.is_leaf()) {
            if (n.kind == VKind::tleaf && !on_seam) pc.fail("seam leaf off the seam");
            if (n.kind == VKind::aleaf && on_seam) pc.fail("boundary leaf on the seam");
            return;
        }
        if (n.kind == VKind::biquilted) hasB = true;
        if (n.kind == VKind::fused) hasF = true;
        if (n.kind == VKind::q1 || n.kind == VKind::q2) has12 = true;
        if (n.kind == VKind::unquilted && n.ch.size() < 2)
            pc.fail("unquilted vertex with valence < 3");
        if (is_colored_kind(n.kind) && n.ch.empty())
            pc.fail("colored vertex with valence < 2");
        if (n.kind == VKind::sphere && n.ch.size() < 2)
            pc.fail("unstable sphere");
        if (n.kind == VKind::quilted) {
            if (n.seam_count < 0 || n.seam_count > static_cast<int>(n.ch.size()))
                pc.fail("bad seam partition");
        } else if (n.seam_count != 0) {
            pc.fail("seam partition on non-quilted vertex");
        }
        if (n.kind == VKind::sphere && !on_seam) pc.fail("sphere off the seam");
        for (size_t i = 0; i < n.ch.size(); ++i) {
            const TreeNode& c = n.ch[i];
            bool child_on_seam =
                (n.kind == VKind::sphere) ||
                (n.kind == VKind::quilted && static_cast<int>(i) < n.seam_count);
            if (n.kind == VKind::sphere && !(c.kind == VKind::tleaf || c.kind == VKind::sphere))
                pc.fail("sphere child must be seam item");
            if (child_on_seam && !(c.kind == VKind::tleaf || c.kind == VKind::sphere))
                pc.fail("seam child must be seam item");
            if (!child_on_seam && (c.kind == VKind::tleaf || c.kind == VKind::sphere))
                pc.fail("seam item on the boundary");
            structural(c, child_on_seam);
        }
    };
    structural(t.root, false);
    if (!pc.ok) return pc.err;

    if (hasB && hasF) return std::string("mixed biquilted and fused vertices");
    if ((hasB || hasF) && has12) return std::string("mixed disjoint and coincident colored sets");

    // leaf labels in planar order
    std::vector<const TreeNode*> as, ts;
    detail::collect_leaves(t.root, as, ts);
    if (static_cast<int>(as.size()) != t.d) return std::string("wrong boundary leaf count");
    if (static_cast<int>(ts.size()) != t.e) return std::string("wrong seam leaf count");
    for (int i = 0; i < t.d; ++i)
        if (as[i]->label != i + 1) return std::string("boundary labels out of planar order");
    for (int i = 0; i < t.e; ++i)
        if (ts[i]->label != i + 1) return std::string("seam labels out of planar order");

    // crossing rule: every root->boundary-leaf path meets exactly one vertex
    // of each colored class; for disjoint bicolored trees class 1 comes first
    auto class_of = [&](VKind k) -> int {
        // bitmask: 1 = first colored set, 2 = second
        switch (k) {
            case VKind::quilted: return 1;
            case VKind::q1: return 1;
            case VKind::q2: return 2;
            case VKind::biquilted: return 3;
            case VKind::fused: return 3;
            default: return 0;
        }
    };
    bool need_colored = t.family != Family::stable;
    int nclasses = (t.family == Family::bicolored) ? 2 : 1;
    std::function<void(const TreeNode&, int, int)> paths =
        [&](const TreeNode& n, int c1, int c2) {
        int m = class_of(n.kind);
        if (m & 1) ++c1;
        if (m & 2) ++c2;
        if ((m & 2) && !(m & 1) && c1 == 0 && t.family == Family::bicolored)
            pc.fail("second colored set above the first");
        if (n.kind == VKind::aleaf) {
            if (need_colored && c1 != 1) pc.fail("path crosses colored set 1 " +
                                                 std::to_string(c1) + " times");
            if (nclasses == 2 && c2 != 1) pc.fail("path crosses colored set 2 " +
                                                  std::to_string(c2) + " times");
            return;
        }
        for (const auto& c : n.ch) paths(c, c1, c2);
    };
    paths(t.root, 0, 0);
    if (!pc.ok) return pc.err;

    return std::nullopt;
}

// -------------------------------------------------------------------------
// Relabeling: assign leaf labels from planar position
// -------------------------------------------------------------------------

inline void relabel_rec(TreeNode& n, int& na, int& nt) {
    if (n.kind == VKind::aleaf) { n.label = ++na; return; }
    if (n.kind == VKind::tleaf) { n.label = ++nt; return; }
    for (auto& c : n.ch) relabel_rec(c, na, nt);
}

inline void relabel(Tree& t) {
    int na = 0, nt = 0;
    relabel_rec(t.root, na, nt);
    t.d = na;
    t.e = nt;
}

// -------------------------------------------------------------------------
// Enumeration
// -------------------------------------------------------------------------

namespace detail {

using NodeList = std::vector<TreeNode>;

inline TreeNode leaf_a() { TreeNode n; n.kind = VKind::aleaf; return n; }
inline TreeNode leaf_t() { TreeNode n; n.kind = VKind::tleaf; return n; }
inline TreeNode mk(VKind k, NodeList ch, int seam = 0) {
    TreeNode n;
    n.kind = k;
    n.ch = std::move(ch);
    n.seam_count = seam;
    return n;
}

// all compositions of n into parts >= minpart (k free, k >= 1)
inline void compositions(int n, int minpart,
                         const std::function<void(const std::vector<int>&)>& cb) {
    std::vector<int> parts;
    std::function<void(int)> rec = [&](int rest) {
        if (rest == 0) { if (!parts.empty()) cb(parts); return; }
        for (int p = minpart; p <= rest; ++p) {
            parts.push_back(p);
            rec(rest - p);
            parts.pop_back();
        }
    };
    rec(n);
}

// compositions into exactly k parts, each >= minpart (minpart may be 0)
inline void compositions_k(int n, int k, int minpart,
                           const std::function<void(const std::vector<int>&)>& cb) {
    std::vector<int> parts;
    std::function<void(int, int)> rec = [&](int rest, int slots) {
        if (slots == 0) { if (rest == 0) cb(parts); return; }
        int lo = minpart, hi = rest - minpart * (slots - 1);
        for (int p = lo; p <= hi; ++p) {
            parts.push_back(p);
            rec(rest - p, slots - 1);
            parts.pop_back();
        }
    };
    rec(n, k);
}

template <typename T>
inline void cartesian(const std::vector<std::vector<T>>& alts,
                      const std::function<void(const std::vector<T>&)>& cb) {
    std::vector<T> pick;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == alts.size()) { cb(pick); return; }
        for (const auto& x : alts[i]) {
            pick.push_back(x);
            rec(i + 1);
            pick.pop_back();
        }
    };
    rec(0);
}

struct EnumCtx {
    std::map<int, NodeList> stable_memo;
    std::map<int, std::vector<NodeList>> forest_memo;
    std::map<int, NodeList> colored_memo;
    std::map<int, NodeList> seamseq_item_memo;
    std::map<int, std::vector<NodeList>> seamseq_memo;
};

// stable subtrees with n boundary leaves; a bare leaf counts when n == 1
inline const NodeList& stable_comps(EnumCtx& cx, int n) {
    auto it = cx.stable_memo.find(n);
    if (it != cx.stable_memo.end()) return it->second;
    NodeList out;
    if (n == 1) out.push_back(leaf_a());
    compositions(n, 1, [&](const std::vector<int>& parts) {
        if (parts.size() < 2) return;
        std::vector<NodeList> alts;
        for (int p : parts) alts.push_back(stable_comps(cx, p));
        cartesian<TreeNode>(alts, [&](const NodeList& pick) {
            out.push_back(mk(VKind::unquilted, pick));
        });
    });
    return cx.stable_memo[n] = std::move(out);
}

// sequences of >= 1 stable subtrees totaling n leaves
inline const std::vector<NodeList>& stable_forests(EnumCtx& cx, int n) {
    auto it = cx.forest_memo.find(n);
    if (it != cx.forest_memo.end()) return it->second;
    std::vector<NodeList> out;
    compositions(n, 1, [&](const std::vector<int>& parts) {
        std::vector<NodeList> alts;
        for (int p : parts) alts.push_back(stable_comps(cx, p));
        cartesian<TreeNode>(alts, [&](const NodeList& pick) { out.push_back(pick); });
    });
    return cx.forest_memo[n] = std::move(out);
}

// assemble an upper (all-unquilted) structure over m ordered slots
inline void assemble_upper(EnumCtx& cx, const std::vector<NodeList>& slot_alts,
                           const std::function<void(const TreeNode&)>& cb) {
    int m = static_cast<int>(slot_alts.size());
    // shapes = stable trees with m leaves (bare leaf when m == 1); substitute
    // slot contents for the leaves, left to right
    for (const TreeNode& shape : stable_comps(cx, m)) {
        std::function<void(const TreeNode&, int&,
                           const std::vector<const TreeNode*>&)> subst_count;
        // enumerate substitutions via cartesian product over slots
        std::vector<std::vector<const TreeNode*>> alts(m);
        for (int j = 0; j < m; ++j)
            for (const auto& t : slot_alts[j]) alts[j].push_back(&t);
        cartesian<const TreeNode*>(alts, [&](const std::vector<const TreeNode*>& pick) {
            int idx = 0;
            std::function<TreeNode(const TreeNode&)> build = [&](const TreeNode& s) {
                if (s.is_leaf()) return *pick[idx++];
                TreeNode n;
                n.kind = s.kind;
                for (const auto& c : s.ch) n.ch.push_back(build(c));
                return n;
            };
            cb(build(shape));
        });
    }
}

// colored-family subtrees with n leaves (root is quilted or unquilted);
// exactly what hangs below a q1 vertex, with VKind::quilted for the color
inline const NodeList& colored_comps(EnumCtx& cx, int n) {
    auto it = cx.colored_memo.find(n);
    if (it != cx.colored_memo.end()) return it->second;
    NodeList out;
    for (int m = 1; m <= n; ++m) {
        compositions_k(n, m, 1, [&](const std::vector<int>& blocks) {
            std::vector<NodeList> slot_alts;
            for (int b : blocks) {
                NodeList alts;
                for (const auto& forest : stable_forests(cx, b))
                    alts.push_back(mk(VKind::quilted, forest));
                slot_alts.push_back(std::move(alts));
            }
            assemble_upper(cx, slot_alts, [&](const TreeNode& n2) { out.push_back(n2); });
        });
    }
    return cx.colored_memo[n] = std::move(out);
}

// seam items covering n seam leaves: a bare t-leaf (n == 1) or a sphere
inline const NodeList& seam_items(EnumCtx& cx, int n) {
    auto it = cx.seamseq_item_memo.find(n);
    if (it != cx.seamseq_item_memo.end()) return it->second;
    NodeList out;
    if (n == 1) out.push_back(leaf_t());
    compositions(n, 1, [&](const std::vector<int>& parts) {
        if (parts.size() < 2) return;
        std::vector<NodeList> alts;
        for (int p : parts) alts.push_back(seam_items(cx, p));
        cartesian<TreeNode>(alts, [&](const NodeList& pick) {
            out.push_back(mk(VKind::sphere, pick));
        });
    });
    return cx.seamseq_item_memo[n] = std::move(out);
}

// sequences of seam items totaling n seam leaves (empty sequence when n == 0)
inline const std::vector<NodeList>& seam_seqs(EnumCtx& cx, int n) {
    auto it = cx.seamseq_memo.find(n);
    if (it != cx.seamseq_memo.end()) return it->second;
    std::vector<NodeList> out;
    if (n == 0) out.push_back({});
    compositions(n, 1, [&](const std::vector<int>& parts) {
        std::vector<NodeList> alts;
        for (int p : parts) alts.push_back(seam_items(cx, p));
        cartesian<TreeNode>(alts, [&](const NodeList& pick) { out.push_back(pick); });
    });
    return cx.seamseq_memo[n] = std::move(out);
}

// boundary forests: sequences of >= 0 stable subtrees totaling n leaves
inline std::vector<NodeList> stable_forests0(EnumCtx& cx, int n) {
    if (n == 0) return {{}};
    return stable_forests(cx, n);
}

inline void set_kind_rec(TreeNode& n, VKind from, VKind to) {
    if (n.kind == from) n.kind = to;
    for (auto& c : n.ch) set_kind_rec(c, from, to);
}

} // namespace detail

inline std::vector<Tree> enumerate_trees(Family family, int d, int e = 0) {
    using namespace detail;
    if (family == Family::stable && d < 2)
        throw std::invalid_argument("stable family requires d >= 2");
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    if (family == Family::seam) {
        if (e < 0) throw std::invalid_argument("e must be >= 0");
    } else if (e != 0) {
        throw std::invalid_argument("e is only meaningful for the seam family");
    }

    EnumCtx cx;
    std::vector<TreeNode> roots;

    switch (family) {
        case Family::stable: {
            roots = stable_comps(cx, d);
            break;
        }
        case Family::colored: {
            roots = colored_comps(cx, d);
            break;
        }
        case Family::bicolored: {
            // coincident colored sets: each colored shape, in both flavors
            for (TreeNode n : colored_comps(cx, d)) {
                TreeNode b = n;
                set_kind_rec(b, VKind::quilted, VKind::biquilted);
                roots.push_back(b);
                TreeNode f = n;
                set_kind_rec(f, VKind::quilted, VKind::fused);
                roots.push_back(f);
            }
            // disjoint colored sets: first level q1, below it colored comps as q2
            for (int m = 1; m <= d; ++m) {
                compositions_k(d, m, 1, [&](const std::vector<int>& blocks) {
                    std::vector<NodeList> slot_alts;
                    for (int b : blocks) {
                        NodeList alts;
                        // children of a q1 vertex: a sequence of colored comps
                        compositions(b, 1, [&](const std::vector<int>& parts) {
                            std::vector<NodeList> palts;
                            for (int p : parts) palts.push_back(colored_comps(cx, p));
                            cartesian<TreeNode>(palts, [&](const NodeList& pick) {
                                alts.push_back(mk(VKind::q1, pick));
                            });
                        });
                        slot_alts.push_back(std::move(alts));
                    }
                    assemble_upper(cx, slot_alts, [&](const TreeNode& n2) {
                        TreeNode r = n2;
                        set_kind_rec(r, VKind::quilted, VKind::q2);
                        roots.push_back(r);
                    });
                });
            }
            break;
        }
        case Family::seam: {
            int mmax = d + e;
            for (int m = 1; m <= mmax; ++m) {
                compositions_k(e, m, 0, [&](const std::vector<int>& tblocks) {
                    compositions_k(d, m, 0, [&](const std::vector<int>& ablocks) {
                        std::vector<NodeList> slot_alts(m);
                        bool ok = true;
                        for (int j = 0; j < m; ++j) {
                            if (tblocks[j] == 0 && ablocks[j] == 0) { ok = false; break; }
                            NodeList alts;
                            for (const auto& seam : seam_seqs(cx, tblocks[j]))
                                for (const auto& bnd : stable_forests0(cx, ablocks[j])) {
                                    NodeList ch = seam;
                                    ch.insert(ch.end(), bnd.begin(), bnd.end());
                                    alts.push_back(mk(VKind::quilted, std::move(ch),
                                                      static_cast<int>(seam.size())));
                                }
                            slot_alts[j] = std::move(alts);
                        }
                        if (!ok) return;
                        assemble_upper(cx, slot_alts,
                                       [&](const TreeNode& n2) { roots.push_back(n2); });
                    });
                });
            }
            break;
        }
    }

    std::vector<Tree> out;
    out.reserve(roots.size());
    for (auto& r : roots) {
        Tree t;
        t.family = family;
        t.root = std::move(r);
        relabel(t);
        if (t.d != d || (family == Family::seam && t.e != e))
            throw std::logic_error("enumeration produced wrong leaf counts");
        out.push_back(std::move(t));
    }
    // sort/dedupe on precomputed keys; comparing Trees directly would
    // re-serialize on every comparison
    std::vector<std::pair<std::string, size_t>> keys;
    keys.reserve(out.size());
    for (size_t i = 0; i < out.size(); ++i) keys.emplace_back(serialize(out[i]), i);
    std::sort(keys.begin(), keys.end());
    std::vector<Tree> uniq;
    uniq.reserve(keys.size());
    for (size_t i = 0; i < keys.size(); ++i)
        if (i == 0 || keys[i].first != keys[i - 1].first)
            uniq.push_back(std::move(out[keys[i].second]));
    out = std::move(uniq);
    for (const auto& t : out) {
        auto err = validate(t);
        if (err) throw std::logic_error("enumeration produced invalid tree: " + *err +
                                        " [" + serialize(t) + "]");
    }
    return out;
}

// -------------------------------------------------------------------------
// Flat view: vertex ids in planar DFS preorder, finite edge list
// -------------------------------------------------------------------------

struct FlatTree {
    struct V {
        VKind kind;
        int label = 0;       // leaves
        int parent = -1;
        int seam_count = 0;
        std::vector<int> children;
    };
    std::vector<V> v;
    std::vector<std::pair<int, int>> finite_edges;  // (parent, child), child internal

    std::vector<int> internal() const {
        std::vector<int> out;
        for (size_t i = 0; i < v.size(); ++i)
            if (!is_leaf_kind(v[i].kind)) out.push_back(static_cast<int>(i));
        return out;
    }
    std::vector<int> colored_class(int cls) const {
        // cls: 1 or 2
        std::vector<int> out;
        for (size_t i = 0; i < v.size(); ++i) {
            VKind k = v[i].kind;
            bool in1 = k == VKind::quilted || k == VKind::q1 || k == VKind::biquilted ||
                       k == VKind::fused;
            bool in2 = k == VKind::q2 || k == VKind::biquilted || k == VKind::fused;
            if ((cls == 1 && in1) || (cls == 2 && in2)) out.push_back(static_cast<int>(i));
        }
        return out;
    }
};

inline FlatTree flatten(const Tree& t) {
    FlatTree f;
    std::function<int(const TreeNode&, int)> rec = [&](const TreeNode& n, int parent) {
        int id = static_cast<int>(f.v.size());
        f.v.push_back({n.kind, n.label, parent, n.seam_count, {}});
        for (const auto& c : n.ch) {
            int cid = rec(c, id);
            f.v[id].children.push_back(cid);
            if (!is_leaf_kind(c.kind))
                f.finite_edges.emplace_back(id, cid);
        }
        return id;
    };
    rec(t.root, -1);
    std::sort(f.finite_edges.begin(), f.finite_edges.end());
    return f;
}

inline int finite_edge_count(const TreeNode& n) {
    int c = 0;
    for (const auto& ch : n.ch)
        if (!ch.is_leaf()) c += 1 + finite_edge_count(ch);
    return c;
}

// -------------------------------------------------------------------------
// Edge contraction
// -------------------------------------------------------------------------

namespace detail {

inline std::optional<VKind> contract_join(VKind parent, VKind child) {
    auto u = VKind::unquilted;
    if (parent == u && child == u) return u;
    if (parent == VKind::quilted && child == u) return VKind::quilted;
    if (parent == u && child == VKind::quilted) return VKind::quilted;
    if (parent == VKind::quilted && child == VKind::sphere) return VKind::quilted;
    if (parent == VKind::sphere && child == VKind::sphere) return VKind::sphere;
    if (parent == VKind::q1 && child == u) return VKind::q1;
    if (parent == u && child == VKind::q1) return VKind::q1;
    if (parent == VKind::q2 && child == u) return VKind::q2;
    if (parent == u && child == VKind::q2) return VKind::q2;
    if (parent == VKind::q1 && child == VKind::q2) return VKind::biquilted;
    if (parent == VKind::biquilted && child == u) return VKind::biquilted;
    if (parent == u && child == VKind::biquilted) return VKind::biquilted;
    if (parent == VKind::fused && child == u) return VKind::fused;
    if (parent == u && child == VKind::fused) return VKind::fused;
    return std::nullopt;
}

} // namespace detail

struct ContractResult {
    std::optional<Tree> tree;
    std::string error;
    bool ok() const { return tree.has_value(); }
};

// Contract the finite edge (parent_id, child_id) given in flat-view ids.
inline ContractResult contract_edge(const Tree& t, int parent_id, int child_id) {
    ContractResult res;
    // walk the tree mirroring flat DFS ids
    int counter = -1;
    bool found = false;
    std::function<void(TreeNode&)> rec = [&](TreeNode& n) {
        int my_id = ++counter;
        for (size_t i = 0; i < n.ch.size(); ++i) {
            // child ids are assigned depth-first
            int child_first = counter + 1;
            TreeNode& c = n.ch[i];
            rec(c);
            if (my_id == parent_id && child_first == child_id) {
                if (c.is_leaf()) { res.error = "edge is not a finite edge"; return; }
                auto join = detail::contract_join(n.kind, c.kind);
                if (!join) { res.error = "kinds cannot merge"; return; }
                bool parent_was_q = n.kind == VKind::quilted;
                bool child_is_seam_side =
                    parent_was_q && static_cast<int>(i) < n.seam_count;
                n.kind = *join;
                // splice child's children in place of the child
                std::vector<TreeNode> grand = c.ch;
                int child_seam = c.seam_count;
                n.ch.erase(n.ch.begin() + i);
                if (c.kind == VKind::quilted && n.kind == VKind::quilted && !parent_was_q) {
                    // an unquilted parent absorbed into a quilted child: the
                    // merged vertex inherits the child's seam side in front
                    std::vector<TreeNode> seam(grand.begin(), grand.begin() + child_seam);
                    std::vector<TreeNode> bnd(grand.begin() + child_seam, grand.end());
                    std::vector<TreeNode> merged = seam;
                    merged.insert(merged.end(), n.ch.begin(), n.ch.begin() + i);
                    merged.insert(merged.end(), bnd.begin(), bnd.end());
                    merged.insert(merged.end(), n.ch.begin() + i, n.ch.end());
                    // wait: children after position i must stay after the splice
                    n.ch = std::move(merged);
                    n.seam_count = child_seam;
                } else {
                    n.ch.insert(n.ch.begin() + i, grand.begin(), grand.end());
                    if (parent_was_q) {
                        if (child_is_seam_side)
                            n.seam_count += static_cast<int>(grand.size()) - 1;
                        // boundary-side splice leaves seam_count unchanged
                        if (c.kind == VKind::quilted)
                            res.error = "quilted vertices are incomparable";
                    }
                }
                found = true;
                return;
            }
            if (found || !res.error.empty()) return;
        }
    };
    Tree copy = t;
    rec(copy.root);
    if (!res.error.empty()) return res;
    if (!found) { res.error = "no such finite edge"; return res; }
    auto err = validate(copy);
    if (err) { res.error = "contraction violates family invariants: " + *err; return res; }
    res.tree = std::move(copy);
    return res;
}

// -------------------------------------------------------------------------
// Face order: T1 refines T2 iff a planar collapse morphism T1 -> T2 exists
// (optionally after globally relaxing fused vertices to biquilted ones)
// -------------------------------------------------------------------------

namespace detail {

inline bool absorbable(VKind target, VKind k) {
    auto u = VKind::unquilted;
    switch (target) {
        case VKind::unquilted: return k == u;
        case VKind::quilted: return k == u || k == VKind::quilted || k == VKind::sphere;
        case VKind::sphere: return k == VKind::sphere;
        case VKind::q1: return k == u || k == VKind::q1;
        case VKind::q2: return k == u || k == VKind::q2;
        case VKind::biquilted:
            return k == u || k == VKind::biquilted || k == VKind::q1 || k == VKind::q2;
        case VKind::fused: return k == u || k == VKind::fused;
        default: return false;
    }
}

struct ClusterState {
    bool has_q = false, has_q1 = false, has_q2 = false, has_b = false, has_f = false;
    void add(VKind k) {
        if (k == VKind::quilted) has_q = true;
        if (k == VKind::q1) has_q1 = true;
        if (k == VKind::q2) has_q2 = true;
        if (k == VKind::biquilted) has_b = true;
        if (k == VKind::fused) has_f = true;
    }
    bool complete(VKind target) const {
        switch (target) {
            case VKind::unquilted: return true;
            case VKind::sphere: return true;
            case VKind::quilted: return has_q;
            case VKind::q1: return has_q1;
            case VKind::q2: return has_q2;
            case VKind::biquilted: return has_b || (has_q1 && has_q2);
            case VKind::fused: return has_f;
            default: return false;
        }
    }
};

bool collapse_match(const TreeNode& n1, const TreeNode& n2);

// Try to realize the child lists of target n2 from a worklist of T1 nodes,
// absorbing some of them into the cluster.  seamQ/bndQ index into n2's
// children.  Backtracking search; trees are tiny.
inline bool match_items(const TreeNode& n2, std::vector<const TreeNode*> items,
                        size_t item_i, size_t seam_i, size_t bnd_i, ClusterState st) {
    VKind target = n2.kind;
    size_t seam_n = 0, bnd_begin = 0;
    if (n2.kind == VKind::quilted) { seam_n = static_cast<size_t>(n2.seam_count); }
    if (n2.kind == VKind::sphere) { seam_n = n2.ch.size(); }
    bnd_begin = seam_n;
    size_t bnd_n = n2.ch.size() - seam_n;

    if (item_i == items.size())
        return seam_i == seam_n && bnd_i == bnd_n && st.complete(target);

    const TreeNode* x = items[item_i];
    bool is_seam_atom = x->kind == VKind::tleaf || x->kind == VKind::sphere;
    bool is_bnd_atom = x->kind == VKind::aleaf || x->kind == VKind::unquilted;

    // option 1: match against the next expected child on its side
    if (is_seam_atom && seam_i < seam_n) {
        if (collapse_match(*x, n2.ch[seam_i]))
            if (match_items(n2, items, item_i + 1, seam_i + 1, bnd_i, st)) return true;
    }
    if (is_bnd_atom && bnd_i < bnd_n) {
        if (collapse_match(*x, n2.ch[bnd_begin + bnd_i]))
            if (match_items(n2, items, item_i + 1, seam_i, bnd_i + 1, st)) return true;
    }
    if (!is_seam_atom && !is_bnd_atom) {
        // colored vertices can also survive as whole child subtrees of n2
        // (e.g. q2 subtrees below a q1 target)
        if (bnd_i < bnd_n && collapse_match(*x, n2.ch[bnd_begin + bnd_i]))
            if (match_items(n2, items, item_i + 1, seam_i, bnd_i + 1, st)) return true;
    }

    // option 2: absorb x into the cluster, splicing its children in place
    if (!x->is_leaf() && absorbable(target, x->kind)) {
        ClusterState st2 = st;
        st2.add(x->kind);
        std::vector<const TreeNode*> items2(items.begin(), items.begin() + item_i);
        for (const auto& c : x->ch) items2.push_back(&c);
        items2.insert(items2.end(), items.begin() + item_i + 1, items.end());
        if (match_items(n2, items2, item_i, seam_i, bnd_i, st2)) return true;
    }
    return false;
}

inline bool collapse_match(const TreeNode& n1, const TreeNode& n2) {
    if (n2.is_leaf())
        return n1.is_leaf() && n1.kind == n2.kind && n1.label == n2.label;
    if (n1.is_leaf()) return false;
    if (!absorbable(n2.kind, n1.kind)) return false;
    ClusterState st;
    st.add(n1.kind);
    std::vector<const TreeNode*> items;
    for (const auto& c : n1.ch) items.push_back(&c);
    return match_items(n2, items, 0, 0, 0, st);
}

} // namespace detail

inline Tree unfuse(const Tree& t) {
    Tree r = t;
    detail::set_kind_rec(r.root, VKind::fused, VKind::biquilted);
    return r;
}

inline bool refines(const Tree& t1, const Tree& t2) {
    if (t1.family != t2.family || t1.d != t2.d || t1.e != t2.e)
        throw std::invalid_argument("refines: mismatched family or leaf counts");
    if (t1.family == Family::bicolored) {
        Flavor f1 = flavor(t1), f2 = flavor(t2);
        bool ok = (f1 == f2) ||
                  (f1 == Flavor::fused && f2 == Flavor::biquilted) ||
                  (f1 == Flavor::disjoint && f2 == Flavor::biquilted);
        if (!ok) return false;
        if (f1 == Flavor::fused && f2 == Flavor::biquilted)
            return detail::collapse_match(unfuse(t1).root, t2.root);
    }
    return detail::collapse_match(t1.root, t2.root);
}

// -------------------------------------------------------------------------
// Expressions
// -------------------------------------------------------------------------

namespace detail {

inline void expr_node(const TreeNode& n, bool at_root, std::string& out) {
    switch (n.kind) {
        case VKind::aleaf: out += "a" + std::to_string(n.label); return;
        case VKind::tleaf: out += "t" + std::to_string(n.label); return;
        case VKind::unquilted: {
            if (!at_root) out += "(";
            for (const auto& c : n.ch) expr_node(c, false, out);
            if (!at_root) out += ")";
            return;
        }
        case VKind::quilted: {
            if (n.seam_count == 0 && n.ch.empty()) { out += "h()"; return; }
            bool seam_family_vertex = false;
            for (const auto& c : n.ch)
                if (c.kind == VKind::tleaf || c.kind == VKind::sphere) seam_family_vertex = true;
            if (n.seam_count > 0 || seam_family_vertex) {
                out += "h(";
                for (int i = 0; i < n.seam_count; ++i) expr_node(n.ch[i], false, out);
                out += "/";
                for (size_t i = n.seam_count; i < n.ch.size(); ++i)
                    expr_node(n.ch[i], false, out);
                out += ")";
            } else {
                out += "h(";
                for (const auto& c : n.ch) expr_node(c, false, out);
                out += ")";
            }
            return;
        }
        case VKind::sphere: {
            out += "(";
            for (const auto& c : n.ch) expr_node(c, false, out);
            out += ")";
            return;
        }
        case VKind::q1: out += "h1("; break;
        case VKind::q2: out += "h2("; break;
        case VKind::biquilted: out += "[h1h2]("; break;
        case VKind::fused: out += "(h1h2)("; break;
    }
    for (const auto& c : n.ch) expr_node(c, false, out);
    out += ")";
}

} // namespace detail

inline std::string to_expression(const Tree& t) {
    std::string out;
    // seam-family quilted vertices always print with the slash, even when
    // one side is empty
    if (t.family == Family::seam) {
        std::function<void(const TreeNode&, bool)> rec = [&](const TreeNode& n, bool root) {
            switch (n.kind) {
                case VKind::aleaf: out += "a" + std::to_string(n.label); return;
                case VKind::tleaf: out += "t" + std::to_string(n.label); return;
                case VKind::sphere:
                    out += "(";
                    for (const auto& c : n.ch) rec(c, false);
                    out += ")";
                    return;
                case VKind::quilted:
                    out += "h(";
                    for (int i = 0; i < n.seam_count; ++i) rec(n.ch[i], false);
                    out += "/";
                    for (size_t i = n.seam_count; i < n.ch.size(); ++i) rec(n.ch[i], false);
                    out += ")";
                    return;
                default:
                    if (!root) out += "(";
                    for (const auto& c : n.ch) rec(c, false);
                    if (!root) out += ")";
                    return;
            }
        };
        rec(t.root, true);
        return out;
    }
    detail::expr_node(t.root, true, out);
    return out;
}

namespace detail {

struct Parser {
    const std::string& s;
    size_t i = 0;
    Family family;

    explicit Parser(const std::string& str, Family f) : s(str), family(f) {}

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("parse error at position " + std::to_string(i) + ": " + msg);
    }
    bool eof() const { return i >= s.size(); }
    char peek() const { return i < s.size() ? s[i] : '\0'; }
    bool consume(const std::string& tok) {
        if (s.compare(i, tok.size(), tok) == 0) { i += tok.size(); return true; }
        return false;
    }
    int number() {
        size_t j = i;
        while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i) fail("expected a number");
        int v = std::stoi(s.substr(i, j - i));
        i = j;
        return v;
    }

    // context: 0 = above/at boundary level, 1 = inside a seam part
    TreeNode item(int ctx) {
        if (ctx == 1) {
            if (consume("t")) { TreeNode n = leaf_t(); n.label = number(); return n; }
            if (consume("(")) {
                TreeNode n;
                n.kind = VKind::sphere;
                while (!consume(")")) {
                    if (eof()) fail("unterminated sphere group");
                    n.ch.push_back(item(1));
                }
                return n;
            }
            fail("expected a seam item");
        }
        if (consume("a")) { TreeNode n = leaf_a(); n.label = number(); return n; }
        if (family == Family::bicolored) {
            if (consume("(h1h2)(")) return head(VKind::fused);
            if (consume("[h1h2](")) return head(VKind::biquilted);
            if (consume("h1(")) return head(VKind::q1);
            if (consume("h2(")) return head(VKind::q2);
        } else if (family != Family::stable) {
            if (consume("h(")) {
                if (family == Family::seam) return seam_head();
                return head(VKind::quilted);
            }
        }
        if (consume("(")) {
            TreeNode n;
            n.kind = VKind::unquilted;
            while (!consume(")")) {
                if (eof()) fail("unterminated group");
                n.ch.push_back(item(0));
            }
            return n;
        }
        fail("unexpected token");
    }

    TreeNode head(VKind k) {
        TreeNode n;
        n.kind = k;
        while (!consume(")")) {
            if (eof()) fail("unterminated operation symbol");
            n.ch.push_back(item(0));
        }
        return n;
    }

    TreeNode seam_head() {
        TreeNode n;
        n.kind = VKind::quilted;
        while (peek() != '/') {
            if (eof()) fail("expected '/' in quilted vertex");
            n.ch.push_back(item(1));
        }
        ++i;  // consume '/'
        n.seam_count = static_cast<int>(n.ch.size());
        while (!consume(")")) {
            if (eof()) fail("unterminated quilted vertex");
            n.ch.push_back(item(0));
        }
        return n;
    }

    TreeNode toplevel() {
        std::vector<TreeNode> items;
        while (!eof()) items.push_back(item(0));
        if (items.empty()) fail("empty expression");
        if (items.size() == 1) return items[0];
        TreeNode n;
        n.kind = VKind::unquilted;
        n.ch = std::move(items);
        return n;
    }
};

} // namespace detail

inline Tree parse_expression(const std::string& s, Family family) {
    detail::Parser p(s, family);
    Tree t;
    t.family = family;
    t.root = p.toplevel();

    // labels must be exactly 1..d / 1..e in planar order
    std::vector<const TreeNode*> as, ts;
    detail::collect_leaves(t.root, as, ts);
    t.d = static_cast<int>(as.size());
    t.e = static_cast<int>(ts.size());
    for (int i = 0; i < t.d; ++i)
        if (as[i]->label != i + 1)
            throw std::runtime_error("boundary variables missing or out of order near a" +
                                     std::to_string(as[i]->label));
    for (int i = 0; i < t.e; ++i)
        if (ts[i]->label != i + 1)
            throw std::runtime_error("seam variables missing or out of order near t" +
                                     std::to_string(ts[i]->label));
    auto err = validate(t);
    if (err) throw std::runtime_error("expression violates family invariants: " + *err);
    return t;
}

} // namespace quilthedra

#endif // QUILTHEDRA_TREES_HPP
