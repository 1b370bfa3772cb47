#ifndef QUILTHEDRA_RELATIONS_HPP
#define QUILTHEDRA_RELATIONS_HPP

#include <quilthedra/rational.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quilthedra {

// =========================================================================
// Finite-set model of Lagrangian correspondences.  A correspondence between
// two finite spaces is just a relation, decorated with a width and an opaque
// brane tag; sequences of correspondences with matching endpoints model
// generalized branes.
// =========================================================================

struct FiniteSpace {
    std::string label;
    std::vector<std::string> elements;

    bool operator==(const FiniteSpace& o) const {
        return label == o.label && elements == o.elements;
    }
    bool contains(const std::string& x) const {
        return std::find(elements.begin(), elements.end(), x) != elements.end();
    }
};

using RelPair = std::pair<std::string, std::string>;

struct Correspondence {
    FiniteSpace src, dst;
    std::set<RelPair> relation;
    Rational width = Rational(1);
    std::string brane;  // grading/spin data carried as an opaque tag

    bool operator==(const Correspondence& o) const {
        return src == o.src && dst == o.dst && relation == o.relation &&
               width == o.width && brane == o.brane;
    }
};

inline void validate_correspondence(const Correspondence& L) {
    if (!(L.width > Rational(0)))
        throw std::invalid_argument("correspondence width must be positive");
    for (const auto& [a, b] : L.relation)
        if (!L.src.contains(a) || !L.dst.contains(b))
            throw std::invalid_argument("relation pair (" + a + "," + b +
                                        ") outside " + L.src.label + " x " +
                                        L.dst.label);
}

inline Correspondence diagonal(const FiniteSpace& M) {
    Correspondence D;
    D.src = M;
    D.dst = M;
    for (const auto& x : M.elements) D.relation.insert({x, x});
    D.brane = "diag(" + M.label + ")";
    return D;
}

// a sequence L_{01}, L_{12}, ... with matching endpoints; the empty sequence
// is allowed and then `base` names the common endpoint.  seam_widths holds
// the widths inserted between consecutive entries (one fewer than entries).
struct GeneralizedCorrespondence {
    FiniteSpace base;  // endpoint of the empty sequence
    std::vector<Correspondence> entries;
    std::vector<Rational> seam_widths;

    const FiniteSpace& source() const {
        return entries.empty() ? base : entries.front().src;
    }
    const FiniteSpace& target() const {
        return entries.empty() ? base : entries.back().dst;
    }
    size_t length() const { return entries.size(); }
};

inline void validate_generalized(const GeneralizedCorrespondence& G) {
    for (const auto& L : G.entries) validate_correspondence(L);
    for (size_t i = 0; i + 1 < G.entries.size(); ++i)
        if (!(G.entries[i].dst == G.entries[i + 1].src))
            throw std::invalid_argument("entry " + std::to_string(i) +
                                        " does not chain: " +
                                        G.entries[i].dst.label + " vs " +
                                        G.entries[i + 1].src.label);
    size_t want = G.entries.size() <= 1 ? 0 : G.entries.size() - 1;
    if (G.seam_widths.size() != want)
        throw std::invalid_argument("wrong number of seam widths");
}

// -------------------------------------------------------------------------
// Operations
// -------------------------------------------------------------------------

inline Correspondence transpose(const Correspondence& L) {
    Correspondence T;
    T.src = L.dst;
    T.dst = L.src;
    for (const auto& [a, b] : L.relation) T.relation.insert({b, a});
    T.width = L.width;
    T.brane = L.brane;
    return T;
}

inline GeneralizedCorrespondence concatenate(const GeneralizedCorrespondence& Lplus,
                                             const GeneralizedCorrespondence& Lminus,
                                             const Rational& eps) {
    if (!(Lplus.target() == Lminus.source()))
        throw std::invalid_argument("concatenate: endpoint mismatch " +
                                    Lplus.target().label + " vs " +
                                    Lminus.source().label);
    if (Lplus.entries.empty()) return Lminus;
    if (Lminus.entries.empty()) return Lplus;
    GeneralizedCorrespondence R;
    R.base = Lplus.base;
    R.entries = Lplus.entries;
    R.entries.insert(R.entries.end(), Lminus.entries.begin(), Lminus.entries.end());
    R.seam_widths = Lplus.seam_widths;
    R.seam_widths.push_back(eps);
    R.seam_widths.insert(R.seam_widths.end(), Lminus.seam_widths.begin(),
                         Lminus.seam_widths.end());
    return R;
}

struct Composition {
    std::set<RelPair> relation;      // pi_02 of the fiber product
    bool embedded = true;            // pi_02 injective on the fiber product
    long fiber_product_size = 0;
};

inline Composition geometric_compose(const Correspondence& L01,
                                     const Correspondence& L12) {
    if (!(L01.dst == L12.src))
        throw std::invalid_argument("geometric_compose: middle space mismatch");
    Composition out;
    std::set<RelPair> seen;
    for (const auto& [a, m] : L01.relation)
        for (const auto& [m2, b] : L12.relation) {
            if (m != m2) continue;
            ++out.fiber_product_size;
            if (!seen.insert({a, b}).second) out.embedded = false;
        }
    out.relation = std::move(seen);
    return out;
}

// the composed relation packaged as a correspondence (width and brane are
// bookkeeping only)
inline Correspondence composed_correspondence(const Correspondence& L01,
                                              const Correspondence& L12) {
    Correspondence C;
    C.src = L01.src;
    C.dst = L12.dst;
    C.relation = geometric_compose(L01, L12).relation;
    C.width = L01.width + L12.width;
    C.brane = L01.brane + "*" + L12.brane;
    return C;
}

// object-level action of the functor attached to L01: append the
// correspondence to the brane
inline GeneralizedCorrespondence phi_on_objects(const Correspondence& L01,
                                                const GeneralizedCorrespondence& brane) {
    if (!(brane.target() == L01.src))
        throw std::invalid_argument("phi_on_objects: brane ends at " +
                                    brane.target().label + ", correspondence starts at " +
                                    L01.src.label);
    GeneralizedCorrespondence R = brane;
    if (!R.entries.empty()) R.seam_widths.push_back(L01.width);
    R.entries.push_back(L01);
    return R;
}

// composite of all entries as a plain relation; the empty sequence gives the
// diagonal of its endpoint
inline std::set<RelPair> total_relation(const GeneralizedCorrespondence& G) {
    if (G.entries.empty()) {
        std::set<RelPair> d;
        for (const auto& x : G.base.elements) d.insert({x, x});
        return d;
    }
    Correspondence acc = G.entries[0];
    for (size_t i = 1; i < G.entries.size(); ++i)
        acc = composed_correspondence(acc, G.entries[i]);
    return acc.relation;
}

// replace entries i, i+1 by their geometric composition
inline GeneralizedCorrespondence fuse_adjacent(const GeneralizedCorrespondence& G,
                                               size_t i) {
    if (i + 1 >= G.entries.size())
        throw std::invalid_argument("fuse_adjacent: index out of range");
    GeneralizedCorrespondence R;
    R.base = G.base;
    for (size_t j = 0; j < G.entries.size(); ++j) {
        if (j == i) {
            R.entries.push_back(composed_correspondence(G.entries[i], G.entries[i + 1]));
            ++j;
        } else {
            R.entries.push_back(G.entries[j]);
        }
    }
    for (size_t j = 0; j < G.seam_widths.size(); ++j)
        if (j != i) R.seam_widths.push_back(G.seam_widths[j]);  // seam i is fused away
    return R;
}

} // namespace quilthedra

#endif // QUILTHEDRA_RELATIONS_HPP
