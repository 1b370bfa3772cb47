#ifndef QUILTHEDRA_AINFTY_HPP
#define QUILTHEDRA_AINFTY_HPP

#include <quilthedra/rational.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace quilthedra {

// =========================================================================
// Finite A-infinity instances with exact coefficients
// =========================================================================

enum class Ring { Z, GF2, Q };

inline const char* ring_name(Ring r) {
    switch (r) {
        case Ring::Z: return "Z";
        case Ring::GF2: return "GF2";
        case Ring::Q: return "Q";
    }
    return "?";
}

inline std::optional<Ring> ring_from_name(const std::string& s) {
    if (s == "Z") return Ring::Z;
    if (s == "GF2") return Ring::GF2;
    if (s == "Q") return Ring::Q;
    return std::nullopt;
}

// sparse element of a Hom module: basis name -> coefficient
using Elem = std::map<std::string, Rational>;

inline void elem_normalize(Elem& e, Ring ring) {
    for (auto it = e.begin(); it != e.end();) {
        if (ring == Ring::GF2) {
            if (it->second.den() != 1)
                throw std::domain_error("GF2 coefficient with denominator");
            Int r = it->second.num() % 2;
            if (r < 0) r += 2;
            it->second = Rational(r);
        }
        if (it->second.is_zero()) it = e.erase(it);
        else ++it;
    }
}

inline void elem_add_scaled(Elem& acc, const Elem& e, const Rational& c, Ring ring) {
    for (const auto& [b, x] : e) acc[b] += c * x;
    elem_normalize(acc, ring);
}

inline std::string elem_str(const Elem& e) {
    if (e.empty()) return "0";
    std::string s;
    for (const auto& [b, c] : e) {
        if (!s.empty()) s += " + ";
        s += c.str() + "*" + b;
    }
    return s;
}

struct GradedModule {
    std::vector<std::string> basis;
    std::vector<int> deg;
};

// table key: arity + input basis names; arity-0 entries key the object name
using TableKey = std::pair<int, std::vector<std::string>>;

struct BasisInfo {
    std::string src, dst;
    int deg = 0;
};

struct AInftyInstance {
    std::string name;
    int N = 0;  // 0 means Z-graded; otherwise an even positive integer
    Ring ring = Ring::Z;
    int Dmax = 4;
    std::vector<std::string> objects;
    std::map<std::pair<std::string, std::string>, GradedModule> homs;
    std::map<TableKey, Elem> mu;

    std::map<std::string, BasisInfo> info;  // filled by finalize()

    int reduce_deg(int d) const {
        if (N == 0) return d;
        int r = d % N;
        return r < 0 ? r + N : r;
    }

    void finalize() {
        if (N != 0 && (N <= 0 || N % 2 != 0))
            throw std::invalid_argument(name + ": grading modulus must be even");
        info.clear();
        std::set<std::string> objs(objects.begin(), objects.end());
        for (auto& [pair, mod] : homs) {
            if (!objs.count(pair.first) || !objs.count(pair.second))
                throw std::invalid_argument(name + ": hom between unknown objects");
            if (mod.basis.size() != mod.deg.size())
                throw std::invalid_argument(name + ": basis/degree size mismatch");
            for (size_t i = 0; i < mod.basis.size(); ++i) {
                mod.deg[i] = reduce_deg(mod.deg[i]);
                auto [it, ok] = info.try_emplace(
                    mod.basis[i], BasisInfo{pair.first, pair.second, mod.deg[i]});
                if (!ok)
                    throw std::invalid_argument(name + ": duplicate basis name " +
                                                mod.basis[i]);
            }
        }
        for (auto& [key, out] : mu) {
            auto& [d, in] = key;
            elem_normalize(const_cast<Elem&>(out), ring);
            std::string src, dst;
            int degsum = 0;
            if (d == 0) {
                if (in.size() != 1 || !objs.count(in[0]))
                    throw std::invalid_argument(name + ": mu^0 must name an object");
                src = dst = in[0];
            } else {
                if (static_cast<int>(in.size()) != d)
                    throw std::invalid_argument(name + ": arity mismatch in mu table");
                for (int i = 0; i < d; ++i) {
                    auto it = info.find(in[i]);
                    if (it == info.end())
                        throw std::invalid_argument(name + ": unknown basis " + in[i]);
                    if (i == 0) src = it->second.src;
                    else if (it->second.src != dst)
                        throw std::invalid_argument(name + ": non-composable mu inputs");
                    dst = it->second.dst;
                    degsum += it->second.deg;
                }
            }
            int want = reduce_deg(degsum + 2 - d);
            for (const auto& [b, c] : out) {
                auto it = info.find(b);
                if (it == info.end())
                    throw std::invalid_argument(name + ": unknown output basis " + b);
                if (it->second.src != src || it->second.dst != dst)
                    throw std::invalid_argument(name + ": mu output in wrong hom");
                if (it->second.deg != want)
                    throw std::invalid_argument(name + ": mu^" + std::to_string(d) +
                                                " violates the degree shift on " + b);
            }
        }
    }

    const BasisInfo& basis_info(const std::string& b) const {
        auto it = info.find(b);
        if (it == info.end())
            throw std::invalid_argument(name + ": unknown basis " + b);
        return it->second;
    }

    int parity(const std::string& b) const { return basis_info(b).deg & 1; }

    Elem mu_basis(int d, const std::vector<std::string>& in) const {
        auto it = mu.find({d, in});
        return it == mu.end() ? Elem{} : it->second;
    }

    // multilinear extension of mu^d to sparse elements
    Elem mu_mixed(int d, const std::vector<Elem>& args) const {
        Elem acc;
        std::vector<std::string> pick(args.size());
        std::function<void(size_t, Rational)> rec = [&](size_t i, Rational c) {
            if (i == args.size()) {
                elem_add_scaled(acc, mu_basis(d, pick), c, ring);
                return;
            }
            for (const auto& [b, x] : args[i]) {
                pick[i] = b;
                rec(i + 1, c * x);
            }
        };
        rec(0, Rational(1));
        return acc;
    }

    bool is_flat() const {
        for (const auto& [key, out] : mu)
            if (key.first == 0 && !out.empty()) return false;
        return true;
    }

    // all composable basis tuples of length d (paths in the object quiver)
    std::vector<std::vector<std::string>> composable_tuples(int d) const {
        std::vector<std::vector<std::string>> out;
        std::vector<std::string> cur;
        std::function<void(const std::string&)> rec = [&](const std::string& at) {
            if (static_cast<int>(cur.size()) == d) { out.push_back(cur); return; }
            for (const auto& [pair, mod] : homs) {
                if (pair.first != at) continue;
                for (const auto& b : mod.basis) {
                    cur.push_back(b);
                    rec(pair.second);
                    cur.pop_back();
                }
            }
        };
        if (d == 0) return out;
        for (const auto& [pair, mod] : homs)
            for (const auto& b : mod.basis) {
                cur.push_back(b);
                rec(pair.second);
                cur.pop_back();
            }
        return out;
    }

    // object sitting after the first n inputs of a tuple
    std::string object_at(const std::vector<std::string>& tuple, int n,
                          const std::string& fallback = "") const {
        if (tuple.empty()) return fallback;
        if (n == 0) return basis_info(tuple[0]).src;
        return basis_info(tuple[n - 1]).dst;
    }
};

struct CheckReport {
    bool ok = true;
    long cases = 0;
    std::vector<std::string> failures;
    void fail(const std::string& what) {
        ok = false;
        failures.push_back(what);
    }
};

namespace detail {

inline std::string tuple_str(const std::vector<std::string>& t) {
    std::string s = "(";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += t[i];
    }
    return s + ")";
}

inline int prefix_parity(const AInftyInstance& C, const std::vector<std::string>& t, int n) {
    int p = 0;
    for (int i = 0; i < n; ++i) p ^= C.parity(t[i]);
    return p;
}

} // namespace detail

// -------------------------------------------------------------------------
// The associativity equations (including curvature insertions)
// -------------------------------------------------------------------------

inline CheckReport check_ainfty(const AInftyInstance& C, int d_max,
                                bool flipped_signs = false) {
    AInftyInstance copy = C;  // finalize validates degree consistency
    copy.finalize();
    CheckReport rep;
    for (int d = 0; d <= d_max; ++d) {
        std::vector<std::vector<std::string>> tuples;
        if (d == 0) tuples.push_back({});
        else tuples = C.composable_tuples(d);
        for (const auto& t : tuples) {
            // at d == 0 the equation is per object
            std::vector<std::string> anchors =
                t.empty() ? C.objects : std::vector<std::string>{""};
            for (const auto& anchor : anchors) {
                Elem residual;
                for (int m = 0; m + 0 <= d; ++m) {
                    for (int n = 0; n + m <= d; ++n) {
                        Elem inner;
                        if (m == 0) {
                            std::string obj = C.object_at(t, n, anchor);
                            inner = C.mu_basis(0, {obj});
                        } else {
                            inner = C.mu_basis(
                                m, std::vector<std::string>(t.begin() + n,
                                                            t.begin() + n + m));
                        }
                        if (inner.empty()) continue;
                        std::vector<Elem> args;
                        for (int i = 0; i < n; ++i) args.push_back({{t[i], Rational(1)}});
                        args.push_back(inner);
                        for (int i = n + m; i < d; ++i)
                            args.push_back({{t[i], Rational(1)}});
                        int par = n & 1;
                        if (!flipped_signs) par ^= detail::prefix_parity(C, t, n);
                        elem_add_scaled(residual, C.mu_mixed(d - m + 1, args),
                                        Rational(par ? -1 : 1), C.ring);
                    }
                }
                ++rep.cases;
                if (!residual.empty())
                    rep.fail("d=" + std::to_string(d) + " " + detail::tuple_str(t) +
                             (t.empty() ? "@" + anchor : "") + " residual " +
                             elem_str(residual));
            }
        }
    }
    return rep;
}

// mu^1 mu^1 = (w(X) - w(Y)) id on Hom(X,Y)
inline CheckReport check_curvature_floer(const AInftyInstance& C,
                                         const std::map<std::string, long>& w) {
    CheckReport rep;
    for (const auto& [pair, mod] : C.homs) {
        long wdiff = w.at(pair.first) - w.at(pair.second);
        for (const auto& b : mod.basis) {
            Elem dd = C.mu_mixed(1, {C.mu_basis(1, {b})});
            Elem expected{{b, Rational(wdiff)}};
            elem_normalize(expected, C.ring);
            ++rep.cases;
            if (dd != expected)
                rep.fail("Hom(" + pair.first + "," + pair.second + ") basis " + b +
                         ": got " + elem_str(dd) + ", want " + elem_str(expected));
        }
    }
    return rep;
}

// -------------------------------------------------------------------------
// A-infinity functors
// -------------------------------------------------------------------------

struct AFunctor {
    std::string name;
    const AInftyInstance* src = nullptr;
    const AInftyInstance* dst = nullptr;
    std::map<std::string, std::string> obj;
    std::map<TableKey, Elem> table;  // F^d, d >= 1

    Elem apply_basis(int d, const std::vector<std::string>& in) const {
        auto it = table.find({d, in});
        return it == table.end() ? Elem{} : it->second;
    }

    Elem apply_mixed(int d, const std::vector<Elem>& args) const {
        Elem acc;
        std::vector<std::string> pick(args.size());
        std::function<void(size_t, Rational)> rec = [&](size_t i, Rational c) {
            if (i == args.size()) {
                elem_add_scaled(acc, apply_basis(d, pick), c, dst->ring);
                return;
            }
            for (const auto& [b, x] : args[i]) {
                pick[i] = b;
                rec(i + 1, c * x);
            }
        };
        rec(0, Rational(1));
        return acc;
    }
};

inline void validate_functor(const AFunctor& F) {
    if (!F.src || !F.dst) throw std::invalid_argument("functor without instances");
    for (const auto& o : F.src->objects)
        if (!F.obj.count(o))
            throw std::invalid_argument(F.name + ": object map misses " + o);
    for (const auto& [key, out] : F.table) {
        auto& [d, in] = key;
        if (d < 1 || static_cast<int>(in.size()) != d)
            throw std::invalid_argument(F.name + ": bad table arity");
        std::string s, t;
        int degsum = 0;
        for (int i = 0; i < d; ++i) {
            const auto& bi = F.src->basis_info(in[i]);
            if (i == 0) s = bi.src;
            else if (bi.src != t)
                throw std::invalid_argument(F.name + ": non-composable inputs");
            t = bi.dst;
            degsum += bi.deg;
        }
        int want = F.dst->reduce_deg(degsum + 1 - d);
        for (const auto& [b, c] : out) {
            const auto& bo = F.dst->basis_info(b);
            if (bo.src != F.obj.at(s) || bo.dst != F.obj.at(t))
                throw std::invalid_argument(F.name + ": output in wrong hom for " + b);
            if (bo.deg != want)
                throw std::invalid_argument(F.name + ": F^" + std::to_string(d) +
                                            " violates the degree shift on " + b);
        }
    }
}

inline CheckReport check_functor(const AFunctor& F, int d_max) {
    validate_functor(F);
    if (!F.src->is_flat() || !F.dst->is_flat())
        throw std::invalid_argument("check_functor: instances must be flat");
    CheckReport rep;
    const AInftyInstance& C0 = *F.src;
    const AInftyInstance& C1 = *F.dst;
    for (int d = 1; d <= d_max; ++d) {
        for (const auto& t : C0.composable_tuples(d)) {
            Elem lhs;
            for (int j = 1; j <= d; ++j)
                for (int i = 0; i + j <= d; ++i) {
                    Elem inner = C0.mu_basis(
                        j, std::vector<std::string>(t.begin() + i, t.begin() + i + j));
                    if (inner.empty()) continue;
                    std::vector<Elem> args;
                    for (int k = 0; k < i; ++k) args.push_back({{t[k], Rational(1)}});
                    args.push_back(inner);
                    for (int k = i + j; k < d; ++k) args.push_back({{t[k], Rational(1)}});
                    int par = (i & 1) ^ detail::prefix_parity(C0, t, i);
                    elem_add_scaled(lhs, F.apply_mixed(d - j + 1, args),
                                    Rational(par ? -1 : 1), C1.ring);
                }
            Elem rhs;
            std::vector<int> blocks;
            std::function<void(int)> rec = [&](int rest) {
                if (rest == 0) {
                    std::vector<Elem> args;
                    int at = 0;
                    for (int b : blocks) {
                        args.push_back(F.apply_basis(
                            b, std::vector<std::string>(t.begin() + at,
                                                        t.begin() + at + b)));
                        at += b;
                    }
                    elem_add_scaled(rhs,
                                    C1.mu_mixed(static_cast<int>(blocks.size()), args),
                                    Rational(1), C1.ring);
                    return;
                }
                for (int b = 1; b <= rest; ++b) {
                    blocks.push_back(b);
                    rec(rest - b);
                    blocks.pop_back();
                }
            };
            rec(d);
            Elem residual = lhs;
            elem_add_scaled(residual, rhs, Rational(-1), C1.ring);
            ++rep.cases;
            if (!residual.empty())
                rep.fail("d=" + std::to_string(d) + " " + detail::tuple_str(t) +
                         " residual " + elem_str(residual));
        }
    }
    return rep;
}

inline AFunctor identity_functor(const AInftyInstance& C) {
    AFunctor F;
    F.name = "id_" + C.name;
    F.src = F.dst = &C;
    for (const auto& o : C.objects) F.obj[o] = o;
    for (const auto& [pair, mod] : C.homs)
        for (const auto& b : mod.basis)
            F.table[{1, {b}}] = Elem{{b, Rational(1)}};
    return F;
}

// composite of F2 followed by F1
inline AFunctor compose_functors(const AFunctor& F1, const AFunctor& F2) {
    if (F2.dst != F1.src)
        throw std::invalid_argument("compose_functors: instances do not chain");
    AFunctor G;
    G.name = F1.name + "." + F2.name;
    G.src = F2.src;
    G.dst = F1.dst;
    for (const auto& [o, img] : F2.obj) G.obj[o] = F1.obj.at(img);
    int dmax = std::min(G.src->Dmax, G.dst->Dmax);
    for (int d = 1; d <= dmax; ++d) {
        for (const auto& t : G.src->composable_tuples(d)) {
            Elem out;
            std::vector<int> blocks;
            std::function<void(int)> rec = [&](int rest) {
                if (rest == 0) {
                    std::vector<Elem> args;
                    int at = 0;
                    for (int b : blocks) {
                        args.push_back(F2.apply_basis(
                            b, std::vector<std::string>(t.begin() + at,
                                                        t.begin() + at + b)));
                        at += b;
                    }
                    elem_add_scaled(out,
                                    F1.apply_mixed(static_cast<int>(blocks.size()), args),
                                    Rational(1), G.dst->ring);
                    return;
                }
                for (int b = 1; b <= rest; ++b) {
                    blocks.push_back(b);
                    rec(rest - b);
                    blocks.pop_back();
                }
            };
            rec(d);
            if (!out.empty()) G.table[{d, t}] = out;
        }
    }
    return G;
}

// -------------------------------------------------------------------------
// Pre-natural transformations
// -------------------------------------------------------------------------

struct PreNat {
    std::string name;
    AFunctor f1, f2;  // source and target functors (by value: tables are small)
    int degT = 0;
    std::map<TableKey, Elem> table;  // d >= 1: (d, tuple); d == 0: (0, {object})

    Elem at(int d, const std::vector<std::string>& in) const {
        auto it = table.find({d, in});
        return it == table.end() ? Elem{} : it->second;
    }
};

inline void validate_prenat(const PreNat& T) {
    const AInftyInstance& C0 = *T.f1.src;
    const AInftyInstance& C1 = *T.f1.dst;
    for (const auto& [key, out] : T.table) {
        auto& [d, in] = key;
        std::string s, t;
        int degsum = 0;
        if (d == 0) {
            if (in.size() != 1) throw std::invalid_argument(T.name + ": bad T^0 key");
            s = t = in[0];
        } else {
            for (int i = 0; i < d; ++i) {
                const auto& bi = C0.basis_info(in[i]);
                if (i == 0) s = bi.src;
                else if (bi.src != t)
                    throw std::invalid_argument(T.name + ": non-composable inputs");
                t = bi.dst;
                degsum += bi.deg;
            }
        }
        // component degree: inputs + |T| + 1 - d, pinned by consistency of
        // the mu^1 display with the homotopy equation
        int want = C1.reduce_deg(degsum + T.degT + 1 - d);
        for (const auto& [b, c] : out) {
            const auto& bo = C1.basis_info(b);
            if (bo.src != T.f1.obj.at(s) || bo.dst != T.f2.obj.at(t))
                throw std::invalid_argument(T.name + ": output in wrong hom for " + b);
            if (bo.deg != want)
                throw std::invalid_argument(T.name + ": T^" + std::to_string(d) +
                                            " violates the degree shift on " + b);
        }
    }
}

namespace detail {

// enumerate compositions of d into m parts where the parts listed in
// `zero_ok` may vanish and all others are >= 1
inline void compositions_zero_at(int d, int m, const std::set<int>& zero_ok,
                                 const std::function<void(const std::vector<int>&)>& cb) {
    std::vector<int> parts;
    std::function<void(int, int)> rec = [&](int rest, int slot) {
        if (slot == m) {
            if (rest == 0) cb(parts);
            return;
        }
        int lo = zero_ok.count(slot) ? 0 : 1;
        for (int p = lo; p <= rest; ++p) {
            parts.push_back(p);
            rec(rest - p, slot + 1);
            parts.pop_back();
        }
    };
    rec(d, 0);
}

} // namespace detail

inline PreNat mu1_prenat(const PreNat& T) {
    validate_prenat(T);
    const AInftyInstance& C0 = *T.f1.src;
    const AInftyInstance& C1 = *T.f1.dst;
    PreNat R;
    R.name = "mu1(" + T.name + ")";
    R.f1 = T.f1;
    R.f2 = T.f2;
    R.degT = T.degT + 1;
    int degT_par = (T.degT % 2 + 2) % 2;
    for (int d = 0; d <= C0.Dmax; ++d) {
        std::vector<std::vector<std::string>> tuples;
        if (d == 0)
            for (const auto& o : C0.objects) tuples.push_back({o});
        else
            tuples = C0.composable_tuples(d);
        for (const auto& t : tuples) {
            const std::vector<std::string> inputs = (d == 0) ? std::vector<std::string>{} : t;
            const std::string anchor = (d == 0) ? t[0] : "";
            Elem out;
            // first sum: mu^m of F1 blocks, one T block, F2 blocks
            for (int m = 1; m <= d + 1; ++m) {
                for (int k = 0; k < m; ++k) {
                    detail::compositions_zero_at(
                        d, m, {k}, [&](const std::vector<int>& parts) {
                        std::vector<Elem> args;
                        int at = 0;
                        int pre = 0;
                        for (int j = 0; j < m; ++j) {
                            std::vector<std::string> block(inputs.begin() + at,
                                                           inputs.begin() + at + parts[j]);
                            if (j < k) args.push_back(T.f1.apply_basis(parts[j], block));
                            else if (j == k) {
                                pre = at;
                                if (parts[j] == 0)
                                    args.push_back(
                                        T.at(0, {C0.object_at(inputs, at, anchor)}));
                                else
                                    args.push_back(T.at(parts[j], block));
                            } else args.push_back(T.f2.apply_basis(parts[j], block));
                            at += parts[j];
                        }
                        // dagger = |T|(|a_1|+...+|a_pre| - pre); with the
                        // degree shift used here (inputs + |T| + 1 - d) the
                        // Koszul weight of T against reduced input degrees is
                        // |T|, which is what makes mu^1 square to zero
                        int par = (degT_par &
                                   (detail::prefix_parity(C0, inputs, pre) ^ (pre & 1))) & 1;
                        elem_add_scaled(out, C1.mu_mixed(m, args),
                                        Rational(par ? -1 : 1), C1.ring);
                    });
                }
            }
            // second sum, subtracted: T absorbing a mu of the source
            for (int e = 1; e <= d; ++e)
                for (int i = 0; i + e <= d; ++i) {
                    Elem inner = C0.mu_basis(
                        e, std::vector<std::string>(inputs.begin() + i,
                                                    inputs.begin() + i + e));
                    if (inner.empty()) continue;
                    std::vector<Elem> args;
                    for (int j = 0; j < i; ++j) args.push_back({{inputs[j], Rational(1)}});
                    args.push_back(inner);
                    for (int j = i + e; j < d; ++j)
                        args.push_back({{inputs[j], Rational(1)}});
                    // T^{d-e+1} applied multilinearly
                    Elem val;
                    {
                        std::vector<std::string> pick(args.size());
                        std::function<void(size_t, Rational)> rec =
                            [&](size_t idx, Rational c) {
                            if (idx == args.size()) {
                                elem_add_scaled(val, T.at(d - e + 1, pick), c, C1.ring);
                                return;
                            }
                            for (const auto& [b, x] : args[idx]) {
                                pick[idx] = b;
                                rec(idx + 1, c * x);
                            }
                        };
                        rec(0, Rational(1));
                    }
                    // -(-1)^{i + |a_1| + ... + |a_i| + |T|}; for |T| = -1
                    // this reduces to the classical dT + Td homotopy signs
                    int par = ((i & 1) ^ detail::prefix_parity(C0, inputs, i) ^
                               degT_par ^ 1) & 1;
                    elem_add_scaled(out, val, Rational(par ? -1 : 1), C1.ring);
                }
            if (!out.empty()) {
                if (d == 0) R.table[{0, t}] = out;
                else R.table[{d, t}] = out;
            }
        }
    }
    return R;
}

inline PreNat mu2_prenat(const PreNat& T1, const PreNat& T2) {
    validate_prenat(T1);
    validate_prenat(T2);
    const AInftyInstance& C0 = *T1.f1.src;
    const AInftyInstance& C1 = *T1.f1.dst;
    PreNat R;
    R.name = "mu2(" + T1.name + "," + T2.name + ")";
    R.f1 = T1.f1;  // F_0
    R.f2 = T2.f2;  // F_2
    // component degrees work out to inputs + (|T1|+|T2|+1) + 1 - d, so the
    // composite of two homotopies is again degree -1
    R.degT = T1.degT + T2.degT + 1;
    int p1 = ((T1.degT % 2) + 2) % 2, p2 = ((T2.degT % 2) + 2) % 2;
    for (int d = 0; d <= C0.Dmax; ++d) {
        std::vector<std::vector<std::string>> tuples;
        if (d == 0)
            for (const auto& o : C0.objects) tuples.push_back({o});
        else
            tuples = C0.composable_tuples(d);
        for (const auto& t : tuples) {
            const std::vector<std::string> inputs = (d == 0) ? std::vector<std::string>{} : t;
            const std::string anchor = (d == 0) ? t[0] : "";
            Elem out;
            for (int m = 2; m <= d + 2; ++m)
                for (int k = 0; k < m; ++k)
                    for (int l = k + 1; l < m; ++l)
                        detail::compositions_zero_at(
                            d, m, {k, l}, [&](const std::vector<int>& parts) {
                            std::vector<Elem> args;
                            int at = 0, pk = 0, pl = 0;
                            for (int j = 0; j < m; ++j) {
                                std::vector<std::string> block(
                                    inputs.begin() + at, inputs.begin() + at + parts[j]);
                                if (j == k) {
                                    pk = at;
                                    args.push_back(parts[j] == 0
                                        ? T1.at(0, {C0.object_at(inputs, at, anchor)})
                                        : T1.at(parts[j], block));
                                } else if (j == l) {
                                    pl = at;
                                    args.push_back(parts[j] == 0
                                        ? T2.at(0, {C0.object_at(inputs, at, anchor)})
                                        : T2.at(parts[j], block));
                                } else if (j < k) {
                                    args.push_back(T1.f1.apply_basis(parts[j], block));
                                } else if (j < l) {
                                    args.push_back(T1.f2.apply_basis(parts[j], block));
                                } else {
                                    args.push_back(T2.f2.apply_basis(parts[j], block));
                                }
                                at += parts[j];
                            }
                            // ddagger = sum_{i<=pk} |T1|(|a_i|-1)
                            //         + sum_{i<=pl} |T2|(|a_i|-1),
                            // the same Koszul weights as in mu^1 above
                            int par = 0;
                            par ^= (p1 &
                                    (detail::prefix_parity(C0, inputs, pk) ^ (pk & 1))) & 1;
                            par ^= (p2 &
                                    (detail::prefix_parity(C0, inputs, pl) ^ (pl & 1))) & 1;
                            elem_add_scaled(out, C1.mu_mixed(m, args),
                                            Rational(par ? -1 : 1), C1.ring);
                        });
            if (!out.empty()) R.table[{d == 0 ? 0 : d, t}] = out;
        }
    }
    return R;
}

// -------------------------------------------------------------------------
// Homotopies
// -------------------------------------------------------------------------

inline bool is_homotopy(const PreNat& T, const AFunctor& F1, const AFunctor& F2,
                        CheckReport* rep_out = nullptr) {
    const AInftyInstance& C0 = *F1.src;
    const AInftyInstance& C1 = *F1.dst;
    int want = C1.reduce_deg(-1);
    if (C1.reduce_deg(T.degT) != want)
        throw std::invalid_argument("is_homotopy: homotopies have degree -1");
    if (F1.obj != F2.obj)
        throw std::invalid_argument("is_homotopy: functors differ on objects");
    PreNat M = mu1_prenat(T);
    CheckReport rep;
    for (int d = 0; d <= C0.Dmax; ++d) {
        std::vector<std::vector<std::string>> tuples;
        if (d == 0)
            for (const auto& o : C0.objects) tuples.push_back({o});
        else
            tuples = C0.composable_tuples(d);
        for (const auto& t : tuples) {
            Elem lhs;
            if (d >= 1) {
                lhs = F1.apply_basis(d, t);
                elem_add_scaled(lhs, F2.apply_basis(d, t), Rational(-1), C1.ring);
            }
            Elem rhs = M.at(d == 0 ? 0 : d, t);
            Elem residual = lhs;
            elem_add_scaled(residual, rhs, Rational(-1), C1.ring);
            ++rep.cases;
            if (!residual.empty())
                rep.fail("d=" + std::to_string(d) + " " + detail::tuple_str(t) +
                         " residual " + elem_str(residual));
        }
    }
    if (rep_out) *rep_out = rep;
    return rep.ok;
}

inline PreNat compose_homotopies(const PreNat& T1, const PreNat& T2) {
    PreNat M2 = mu2_prenat(T1, T2);
    PreNat R;
    R.name = T2.name + "o" + T1.name;
    R.f1 = T1.f1;
    R.f2 = T2.f2;
    R.degT = -1;
    const AInftyInstance& C1 = *T1.f1.dst;
    std::set<TableKey> keys;
    for (const auto& [k, v] : T1.table) keys.insert(k);
    for (const auto& [k, v] : T2.table) keys.insert(k);
    for (const auto& [k, v] : M2.table) keys.insert(k);
    for (const auto& k : keys) {
        Elem out = T1.at(k.first, k.second);
        elem_add_scaled(out, T2.at(k.first, k.second), Rational(1), C1.ring);
        elem_add_scaled(out, M2.at(k.first, k.second), Rational(1), C1.ring);
        if (!out.empty()) R.table[k] = out;
    }
    return R;
}

// -------------------------------------------------------------------------
// Cohomology functor
// -------------------------------------------------------------------------

namespace detail {

// dense linear algebra over the instance's field
struct FieldOps {
    Ring ring;
    Rational norm(const Rational& x) const {
        if (ring != Ring::GF2) return x;
        Int r = x.num() % 2;
        if (r < 0) r += 2;
        return Rational(r);
    }
};

// returns coefficients expressing target in the span of the columns, if any
inline std::optional<std::vector<Rational>> solve_span(
    const FieldOps& f, std::vector<std::vector<Rational>> cols,
    std::vector<Rational> target) {
    size_t n = target.size(), m = cols.size();
    // augmented row reduction on [cols | target]
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(m + 1));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) a[i][j] = f.norm(cols[j][i]);
        a[i][m] = f.norm(target[i]);
    }
    std::vector<int> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < m && r < n; ++c) {
        size_t p = r;
        while (p < n && a[p][c].is_zero()) ++p;
        if (p == n) continue;
        std::swap(a[p], a[r]);
        Rational inv = Rational(1) / a[r][c];
        for (size_t j = 0; j <= m; ++j) a[r][j] = f.norm(a[r][j] * inv);
        for (size_t i = 0; i < n; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            Rational fct = a[i][c];
            for (size_t j = 0; j <= m; ++j) a[i][j] = f.norm(a[i][j] - fct * a[r][j]);
        }
        pivot_col.push_back(static_cast<int>(c));
        ++r;
    }
    for (size_t i = r; i < n; ++i)
        if (!a[i][m].is_zero()) return std::nullopt;
    std::vector<Rational> coef(m, Rational(0));
    for (size_t i = 0; i < r; ++i) coef[pivot_col[i]] = a[i][m];
    return coef;
}

inline bool in_span(const FieldOps& f, const std::vector<std::vector<Rational>>& cols,
                    const std::vector<Rational>& target) {
    return solve_span(f, cols, target).has_value();
}

} // namespace detail

struct HomologyBasis {
    std::vector<std::string> ambient;       // hom basis order
    std::vector<std::vector<Rational>> ker; // cycle column vectors
    std::vector<std::vector<Rational>> im;  // boundary column vectors
    std::vector<std::vector<Rational>> reps;// chosen representatives of H
};

inline HomologyBasis hom_homology(const AInftyInstance& C,
                                  const std::pair<std::string, std::string>& pair) {
    if (C.ring == Ring::Z)
        throw std::invalid_argument("cohomology requires field coefficients");
    detail::FieldOps f{C.ring};
    const GradedModule& mod = C.homs.at(pair);
    size_t n = mod.basis.size();
    HomologyBasis H;
    H.ambient = mod.basis;
    auto col_of = [&](const Elem& e) {
        std::vector<Rational> v(n, Rational(0));
        for (const auto& [b, c] : e) {
            for (size_t i = 0; i < n; ++i)
                if (mod.basis[i] == b) v[i] = f.norm(c);
        }
        return v;
    };
    // boundaries
    for (const auto& b : mod.basis) {
        Elem db = C.mu_basis(1, {b});
        std::vector<Rational> v = col_of(db);
        bool zero = true;
        for (const auto& x : v) if (!x.is_zero()) zero = false;
        if (!zero && !detail::in_span(f, H.im, v)) H.im.push_back(v);
    }
    // cycles: kernel of mu^1 via candidate elimination -- iterate over basis
    // combinations using nullspace computation
    {
        // build matrix of mu^1 and compute a nullspace basis
        std::vector<std::vector<Rational>> M(n, std::vector<Rational>(n, Rational(0)));
        for (size_t j = 0; j < n; ++j) {
            Elem db = C.mu_basis(1, {mod.basis[j]});
            auto v = col_of(db);
            for (size_t i = 0; i < n; ++i) M[i][j] = v[i];
        }
        // row reduce M, track pivot columns; free columns generate the kernel
        std::vector<std::vector<Rational>> a = M;
        std::vector<int> pivots;
        size_t r = 0;
        for (size_t c = 0; c < n && r < n; ++c) {
            size_t p = r;
            while (p < n && a[p][c].is_zero()) ++p;
            if (p == n) continue;
            std::swap(a[p], a[r]);
            Rational inv = Rational(1) / a[r][c];
            for (size_t j = 0; j < n; ++j) a[r][j] = f.norm(a[r][j] * inv);
            for (size_t i = 0; i < n; ++i) {
                if (i == r || a[i][c].is_zero()) continue;
                Rational fct = a[i][c];
                for (size_t j = 0; j < n; ++j) a[i][j] = f.norm(a[i][j] - fct * a[r][j]);
            }
            pivots.push_back(static_cast<int>(c));
            ++r;
        }
        std::set<int> piv(pivots.begin(), pivots.end());
        for (size_t c = 0; c < n; ++c) {
            if (piv.count(static_cast<int>(c))) continue;
            std::vector<Rational> v(n, Rational(0));
            v[c] = Rational(1);
            for (size_t i = 0; i < r; ++i)
                v[pivots[i]] = f.norm(Rational(0) - a[i][c]);
            H.ker.push_back(v);
        }
    }
    // representatives: cycles independent of the boundaries
    std::vector<std::vector<Rational>> span = H.im;
    for (const auto& v : H.ker) {
        if (!detail::in_span(f, span, v)) {
            span.push_back(v);
            H.reps.push_back(v);
        }
    }
    return H;
}

struct HFunctor {
    bool well_defined = true;
    // per source hom pair: matrix of the induced map in the chosen H bases
    std::map<std::pair<std::string, std::string>, std::vector<std::vector<Rational>>> mat;
    std::map<std::pair<std::string, std::string>, HomologyBasis> h_src;
    std::map<std::pair<std::string, std::string>, HomologyBasis> h_dst;
};

inline HFunctor cohomology_functor(const AFunctor& F) {
    validate_functor(F);
    const AInftyInstance& C0 = *F.src;
    const AInftyInstance& C1 = *F.dst;
    if (C0.ring == Ring::Z || C1.ring == Ring::Z)
        throw std::invalid_argument("cohomology_functor: non-field coefficients");
    // mu^1 squared must vanish
    for (const auto& [pair, mod] : C0.homs)
        for (const auto& b : mod.basis)
            if (!C0.mu_mixed(1, {C0.mu_basis(1, {b})}).empty())
                throw std::invalid_argument("cohomology_functor: mu^1 does not square to 0");
    detail::FieldOps f{C1.ring};
    HFunctor H;
    for (const auto& [pair, mod] : C0.homs) {
        std::pair<std::string, std::string> img{F.obj.at(pair.first), F.obj.at(pair.second)};
        HomologyBasis hs = hom_homology(C0, pair);
        HomologyBasis hd = hom_homology(C1, img);
        const GradedModule& dmod = C1.homs.at(img);
        auto col_of_dst = [&](const Elem& e) {
            std::vector<Rational> v(dmod.basis.size(), Rational(0));
            for (const auto& [b, c] : e)
                for (size_t i = 0; i < dmod.basis.size(); ++i)
                    if (dmod.basis[i] == b) v[i] = f.norm(c);
            return v;
        };
        std::vector<std::vector<Rational>> cols = hd.im;
        for (const auto& r : hd.reps) cols.push_back(r);
        std::vector<std::vector<Rational>> matrix(hd.reps.size(),
                                                  std::vector<Rational>(hs.reps.size(),
                                                                        Rational(0)));
        for (size_t j = 0; j < hs.reps.size(); ++j) {
            // F^1 of the representative
            Elem e;
            for (size_t i = 0; i < hs.ambient.size(); ++i)
                if (!hs.reps[j][i].is_zero()) e[hs.ambient[i]] = hs.reps[j][i];
            Elem img_e = F.apply_mixed(1, {e});
            auto v = col_of_dst(img_e);
            auto sol = detail::solve_span(f, cols, v);
            if (!sol) { H.well_defined = false; continue; }
            for (size_t i = 0; i < hd.reps.size(); ++i)
                matrix[i][j] = (*sol)[hd.im.size() + i];
        }
        // boundary goes to boundary
        for (size_t i = 0; i < hs.ambient.size(); ++i) {
            Elem db = C0.mu_basis(1, {hs.ambient[i]});
            if (db.empty()) continue;
            Elem img_b = F.apply_mixed(1, {db});
            if (!detail::in_span(f, hd.im, col_of_dst(img_b))) H.well_defined = false;
        }
        H.mat[pair] = matrix;
        H.h_src[pair] = hs;
        H.h_dst[pair] = hd;
    }
    return H;
}

} // namespace quilthedra

#endif // QUILTHEDRA_AINFTY_HPP
