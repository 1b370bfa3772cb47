// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Time limits are asserted where the criterion carries one.
#include <quilthedra/bijections.hpp>
#include <quilthedra/gluing.hpp>
#include <quilthedra/polytopes.hpp>
#include <quilthedra/relations.hpp>
#include <quilthedra/signs.hpp>

#include "ainfty_fixtures.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace quilthedra;

namespace {

int g_failures = 0;

long run_criterion(int num, const std::string& what, long limit_ms,
                   const std::function<bool(std::string&)>& body) {
    std::string detail;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& ex) {
        detail = std::string("exception: ") + ex.what();
    }
    long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    if (limit_ms > 0 && ms > limit_ms) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time limit ") +
                  std::to_string(limit_ms) + "ms";
    }
    if (!ok) ++g_failures;
    std::printf("%s  criterion %2d: %s (%ld ms)%s%s\n", ok ? "PASS" : "FAIL", num,
                what.c_str(), ms, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    return ms;
}

// ---- criterion 2 oracle: brute-force full parenthesizations ---------------

void all_parenthesizations(int lo, int hi, std::set<std::string>& out,
                           std::vector<std::string>& scratch) {
    // returns via `scratch` all full binary parenthesizations of letters lo..hi
    scratch.clear();
    if (lo == hi) {
        scratch.push_back("x" + std::to_string(lo));
        return;
    }
    std::vector<std::string> acc;
    for (int mid = lo; mid < hi; ++mid) {
        std::vector<std::string> left, right;
        all_parenthesizations(lo, mid, out, left);
        all_parenthesizations(mid + 1, hi, out, right);
        for (const auto& l : left)
            for (const auto& r : right) acc.push_back("(" + l + r + ")");
    }
    scratch = std::move(acc);
}

long parenthesization_count(int d) {
    std::set<std::string> dedup;
    std::vector<std::string> all;
    all_parenthesizations(1, d, dedup, all);
    dedup.insert(all.begin(), all.end());
    return static_cast<long>(dedup.size());
}

// ---- criterion 10 oracle: bitmask relations on 3-element spaces ------------

// masks over 3x3 relations; bit 3*i+j = (i,j) in the relation
int bitmask_compose(int a, int b) {
    int out = 0;
    for (int i = 0; i < 3; ++i) {
        int row = (a >> (3 * i)) & 7;
        int acc = 0;
        for (int j = 0; j < 3; ++j)
            if (row & (1 << j)) acc |= (b >> (3 * j)) & 7;
        out |= acc << (3 * i);
    }
    return out;
}

Correspondence mask_to_corr(const FiniteSpace& A, const FiniteSpace& B, int mask) {
    Correspondence L;
    L.src = A;
    L.dst = B;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (mask & (1 << (3 * i + j)))
                L.relation.insert({A.elements[i], B.elements[j]});
    return L;
}

int corr_to_mask(const std::set<RelPair>& rel, const FiniteSpace& A,
                 const FiniteSpace& B) {
    int mask = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (rel.count({A.elements[i], B.elements[j]})) mask |= 1 << (3 * i + j);
    return mask;
}

FiniteSpace mk_space(const std::string& label, int n) {
    FiniteSpace M;
    M.label = label;
    for (int i = 0; i < n; ++i) M.elements.push_back(label + std::to_string(i));
    return M;
}

// shared posets for criteria 3 and 5 (built once; the build cost counts
// toward the Euler criterion, which carries the time budget)
struct PosetRow {
    Family fam;
    int d, e;
    FacePoset p;
};

PreNat random_prenat(const AFunctor& F1, const AFunctor& F2, int degT,
                     std::mt19937& rng) {
    PreNat T;
    T.name = "rand";
    T.f1 = F1;
    T.f2 = F2;
    T.degT = degT;
    const AInftyInstance& C0 = *F1.src;
    const AInftyInstance& C1 = *F1.dst;
    for (int d = 0; d <= C0.Dmax; ++d) {
        std::vector<std::vector<std::string>> tuples;
        if (d == 0)
            for (const auto& o : C0.objects) tuples.push_back({o});
        else
            tuples = C0.composable_tuples(d);
        for (const auto& t : tuples) {
            int degsum = 0;
            std::string s, e;
            if (d == 0) {
                s = e = t[0];
            } else {
                s = C0.basis_info(t[0]).src;
                e = C0.basis_info(t.back()).dst;
                for (const auto& b : t) degsum += C0.basis_info(b).deg;
            }
            int want = C1.reduce_deg(degsum + degT + 1 - d);
            auto it = C1.homs.find({F1.obj.at(s), F2.obj.at(e)});
            if (it == C1.homs.end()) continue;
            Elem out;
            for (size_t i = 0; i < it->second.basis.size(); ++i)
                if (C1.reduce_deg(it->second.deg[i]) == want) {
                    long c = static_cast<long>(rng() % 7) - 3;
                    if (c != 0) out[it->second.basis[i]] = Rational(c);
                }
            if (!out.empty()) T.table[{d, t}] = out;
        }
    }
    return T;
}

bool prenat_is_zero(const PreNat& T) {
    for (const auto& [k, v] : T.table)
        if (!v.empty()) return false;
    return true;
}

} // namespace

int main() {
    // ---- 1: f-vectors of the small polytopes, < 1 s each -------------------
    {
        struct Row {
            Family fam;
            int d, e;
            std::vector<long> fv;
            const char* label;
        };
        std::vector<Row> rows = {
            {Family::stable, 4, 0, {5, 5, 1}, "stable d=4"},
            {Family::colored, 2, 0, {2, 1}, "colored d=2"},
            {Family::colored, 3, 0, {6, 6, 1}, "colored d=3"},
            {Family::seam, 2, 1, {8, 8, 1}, "seam d=2 e=1"},
            {Family::seam, 1, 1, {2, 1}, "seam d=1 e=1"},
            {Family::bicolored, 2, 0, {5, 5, 1}, "bicolored d=2"},
        };
        for (const auto& r : rows)
            run_criterion(1, std::string("f-vector ") + r.label, 1000,
                          [&](std::string& detail) {
                              FacePoset p = build_face_poset(r.fam, r.d, r.e);
                              if (f_vector(p) == r.fv) return true;
                              detail = "got a different f-vector";
                              return false;
                          });
    }

    // ---- 2: vertex counts vs. brute-force parenthesizations, < 10 s --------
    run_criterion(2, "associahedron vertices = Catalan(d-1), d <= 8", 10000,
                  [&](std::string& detail) {
                      for (int d = 2; d <= 8; ++d) {
                          long vertices = 0;
                          for (const auto& t : enumerate_trees(Family::stable, d))
                              if (face_dim(t) == 0) ++vertices;
                          long oracle = parenthesization_count(d);
                          if (vertices != oracle) {
                              detail = "d=" + std::to_string(d) + ": " +
                                       std::to_string(vertices) + " vs oracle " +
                                       std::to_string(oracle);
                              return false;
                          }
                      }
                      return true;
                  });

    // ---- 3 and 5 share the posets -------------------------------------------
    std::vector<PosetRow> posets;
    run_criterion(3, "Euler characteristic 1, all families d <= 6 (e <= 2)", 60000,
                  [&](std::string& detail) {
                      for (Family fam : {Family::stable, Family::colored,
                                         Family::bicolored, Family::seam}) {
                          int lo = fam == Family::stable ? 2 : 1;
                          int emax = fam == Family::seam ? 2 : 0;
                          for (int d = lo; d <= 6; ++d)
                              for (int e = 0; e <= emax; ++e) {
                                  posets.push_back(
                                      {fam, d, e,
                                       build_face_poset(fam, d, e, false)});
                                  if (!euler_check(posets.back().p)) {
                                      detail = std::string(family_name(fam)) +
                                               " d=" + std::to_string(d) +
                                               " e=" + std::to_string(e);
                                      return false;
                                  }
                              }
                      }
                      return true;
                  });

    // ---- 4: facet families of the d=2 bimultiplihedron ----------------------
    run_criterion(4, "bicolored d=2 facet counts {2,1,1,1}", 0,
                  [&](std::string& detail) {
                      FacePoset p = build_face_poset(Family::bicolored, 2, 0);
                      std::multiset<long> got;
                      long total = 0;
                      for (const auto& [tag, n] : facet_families(p)) {
                          if (n > 0) got.insert(n);
                          total += n;
                      }
                      if (total == 5 && got == std::multiset<long>{1, 1, 1, 2})
                          return true;
                      detail = "facet counts differ";
                      return false;
                  });

    // ---- 5: stratum codimension 1 exactly on facets -------------------------
    run_criterion(5, "stratum_codim = 1 iff facet, all families d <= 6", 0,
                  [&](std::string& detail) {
                      for (const auto& row : posets) {
                          const FacePoset& p = row.p;
                          for (size_t i = 0; i < p.faces.size(); ++i) {
                              bool facet = p.dims[i] == p.dim - 1;
                              if ((stratum_codim(p.faces[i]) == 1) != facet) {
                                  detail = std::string(family_name(row.fam)) +
                                           " d=" + std::to_string(row.d) + ": " +
                                           to_expression(p.faces[i]);
                                  return false;
                              }
                          }
                      }
                      return true;
                  });
    posets.clear();

    // ---- 6: exhaustive sign congruences, d <= 6, < 30 s ----------------------
    run_criterion(6, "sign congruences exhaustive, d <= 6", 30000,
                  [&](std::string& detail) {
                      for (int d = 1; d <= 6; ++d)
                          for (int m = 1; m <= d; ++m)
                              for (int n = 0; n + m <= d; ++n)
                                  if (!assoc_sign_identity(d, n, m)) {
                                      detail = "assoc d=" + std::to_string(d);
                                      return false;
                                  }
                      bool ok = true;
                      std::vector<int> acc;
                      std::function<void(int, int)> rec = [&](int rest, int d) {
                          if (!ok) return;
                          if (rest == 0) {
                              if (!acc.empty() && !functor_sign_identity(d, acc)) {
                                  ok = false;
                                  detail = "functor d=" + std::to_string(d);
                              }
                              return;
                          }
                          for (int f = 1; f <= rest; ++f) {
                              acc.push_back(f);
                              rec(rest - f, d);
                              acc.pop_back();
                          }
                      };
                      for (int d = 1; d <= 6 && ok; ++d) rec(d, d);
                      return ok;
                  });

    // ---- 7: Jacobian orientation oracle = closed forms, d <= 5 ---------------
    run_criterion(7, "Jacobian sign oracle matches closed forms, d <= 5", 0,
                  [&](std::string& detail) {
                      for (int d = 3; d <= 5; ++d)
                          for (int m = 2; m <= d; ++m)
                              for (int n = 0; n + m <= d; ++n) {
                                  if (n == 0 && m == d) continue;
                                  GluingMapSpec s;
                                  s.kind = GluingMapSpec::Kind::assoc;
                                  s.d = d; s.n = n; s.m = m;
                                  if (gluing_orientation_sign(s) != closed_form_sign(s)) {
                                      detail = "assoc d=" + std::to_string(d);
                                      return false;
                                  }
                              }
                      for (int d = 2; d <= 5; ++d)
                          for (int i = 2; i <= d; ++i)
                              for (int j = 0; i + j <= d; ++j) {
                                  GluingMapSpec s;
                                  s.kind = GluingMapSpec::Kind::multiplihedron_unquilted;
                                  s.d = d; s.i = i; s.j = j;
                                  if (gluing_orientation_sign(s) != closed_form_sign(s)) {
                                      detail = "unquilted d=" + std::to_string(d);
                                      return false;
                                  }
                              }
                      bool ok = true;
                      std::vector<int> acc;
                      std::function<void(int, int)> rec = [&](int rest, int d) {
                          if (!ok) return;
                          if (rest == 0) {
                              if (acc.size() >= 2) {
                                  GluingMapSpec s;
                                  s.kind = GluingMapSpec::Kind::multiplihedron_quilted;
                                  s.d = d;
                                  s.blocks = acc;
                                  if (gluing_orientation_sign(s) != closed_form_sign(s)) {
                                      ok = false;
                                      detail = "quilted d=" + std::to_string(d);
                                  }
                              }
                              return;
                          }
                          for (int f = 1; f <= rest; ++f) {
                              acc.push_back(f);
                              rec(rest - f, d);
                              acc.pop_back();
                          }
                      };
                      for (int d = 2; d <= 5 && ok; ++d) rec(d, d);
                      return ok;
                  });

    // ---- 8: term-facet bijections -------------------------------------------
    run_criterion(8, "term families biject with tagged facets", 0,
                  [&](std::string& detail) {
                      struct Row { const char* id; int lo, hi, e; };
                      for (const Row& r :
                           {Row{"assoc", 3, 6, 0}, Row{"functor", 2, 5, 0},
                            Row{"prenat-mu1", 1, 4, 1}, Row{"homotopy", 1, 4, 0}}) {
                          for (int d = r.lo; d <= r.hi; ++d) {
                              BijectionReport b = term_facet_correspondence(r.id, d, r.e);
                              if (!b.ok || !b.unmatched_terms.empty() ||
                                  !b.unmatched_facets.empty() ||
                                  !b.duplicate_terms.empty()) {
                                  detail = std::string(r.id) +
                                           " d=" + std::to_string(d);
                                  return false;
                              }
                          }
                      }
                      return true;
                  });

    // ---- 9: A-infinity engine on fixtures, < 60 s -----------------------------
    run_criterion(9, "A-infinity engine fixture suite", 60000,
                  [&](std::string& detail) {
                      AInftyInstance quiver = fx::quiver();
                      if (!check_ainfty(quiver, 4).ok) { detail = "quiver"; return false; }
                      AInftyInstance bad = fx::quiver();
                      bad.mu[{2, {"ab", "c"}}] = Elem{{"abc", Rational(-1)}};
                      if (check_ainfty(bad, 4).ok) { detail = "negative control"; return false; }
                      AInftyInstance bh = fx::bh();
                      if (!check_ainfty(bh, 4).ok || check_ainfty(bh, 4, true).ok) {
                          detail = "sign-flip control";
                          return false;
                      }

                      // mu^1 is a differential on pre-natural transformations
                      AInftyInstance p1 = fx::point("p1"), p2 = fx::point("p2");
                      std::mt19937 rng(4242);
                      for (const AInftyInstance* C :
                           std::initializer_list<const AInftyInstance*>{&quiver, &bh, &p1}) {
                          const AInftyInstance& inst = *C;
                          AFunctor id = identity_functor(inst);
                          for (int trial = 0; trial < 15; ++trial) {
                              int degT = static_cast<int>(rng() % 4) - 2;
                              PreNat T = random_prenat(id, id, degT, rng);
                              if (!prenat_is_zero(mu1_prenat(mu1_prenat(T)))) {
                                  detail = "mu1 mu1 != 0 on " + inst.name;
                                  return false;
                              }
                          }
                      }

                      // functor composition
                      AFunctor F1 = fx::point_to_bh(p1, bh, 2);
                      AFunctor F12 = fx::point_to_pointk(p2, p1);
                      AInftyInstance pk = fx::pointk();
                      AFunctor Fa = fx::point_to_pointk(p2, pk);
                      AFunctor Fb = fx::pointk_to_bh(pk, bh);
                      AFunctor G = compose_functors(Fb, Fa);
                      if (!check_functor(G, 4).ok) { detail = "compose_functors"; return false; }

                      // homotopy composition
                      AFunctor F0 = fx::point_to_bh(p1, bh, 0);
                      AFunctor Fc = fx::point_to_bh(p1, bh, 1);
                      PreNat T1 = fx::bh_homotopy_from_zero(F0, Fc, 1, 2);
                      PreNat T2 = fx::bh_self_homotopy(Fc, 1, 1);
                      if (!is_homotopy(T1, F0, Fc) || !is_homotopy(T2, Fc, Fc)) {
                          detail = "homotopy fixtures";
                          return false;
                      }
                      if (!is_homotopy(compose_homotopies(T1, T2), F0, Fc)) {
                          detail = "compose_homotopies";
                          return false;
                      }

                      // curvature: the differential squares to the weight gap
                      AInftyInstance curved = fx::curvature_pair();
                      if (!check_curvature_floer(curved, {{"U", 1}, {"V", 0}}).ok) {
                          detail = "curvature identity";
                          return false;
                      }
                      if (check_curvature_floer(curved, {{"U", 0}, {"V", 0}}).ok) {
                          detail = "curvature negative control";
                          return false;
                      }
                      return true;
                  });

    // ---- 10: relations model --------------------------------------------------
    run_criterion(10, "relations: identities and exhaustive associativity", 0,
                  [&](std::string& detail) {
                      FiniteSpace A = mk_space("a", 3), B = mk_space("b", 3),
                                  C = mk_space("c", 3), D = mk_space("d", 3);

                      // L o diagonal = L, embedded
                      std::mt19937 rng(9);
                      for (int trial = 0; trial < 50; ++trial) {
                          Correspondence L = mask_to_corr(A, B, static_cast<int>(rng() % 512));
                          Composition c = geometric_compose(L, diagonal(B));
                          if (c.relation != L.relation || !c.embedded) {
                              detail = "diagonal identity";
                              return false;
                          }
                      }

                      // the two-point non-embedded counterexample
                      FiniteSpace M0 = mk_space("p", 1), M1 = mk_space("x", 2),
                                  M2 = mk_space("q", 1);
                      Correspondence L01, L12;
                      L01.src = M0; L01.dst = M1;
                      L01.relation = {{"p0", "x0"}, {"p0", "x1"}};
                      L12.src = M1; L12.dst = M2;
                      L12.relation = {{"x0", "q0"}, {"x1", "q0"}};
                      Composition two = geometric_compose(L01, L12);
                      if (two.embedded || two.fiber_product_size != 2) {
                          detail = "two-point counterexample";
                          return false;
                      }

                      // cross-validate the bitmask oracle against the API on
                      // every pair of relations between 3-element spaces
                      for (int a = 0; a < 512; ++a) {
                          Correspondence La = mask_to_corr(A, B, a);
                          for (int b = 0; b < 512; ++b) {
                              Composition c = geometric_compose(
                                  La, mask_to_corr(B, C, b));
                              if (corr_to_mask(c.relation, A, C) !=
                                  bitmask_compose(a, b)) {
                                  detail = "oracle mismatch";
                                  return false;
                              }
                          }
                      }

                      // exhaustive associativity over all 512^3 triples via the
                      // validated oracle table
                      static int table[512][512];
                      for (int a = 0; a < 512; ++a)
                          for (int b = 0; b < 512; ++b)
                              table[a][b] = bitmask_compose(a, b);
                      for (int a = 0; a < 512; ++a)
                          for (int b = 0; b < 512; ++b) {
                              int ab = table[a][b];
                              for (int c = 0; c < 512; ++c)
                                  if (table[ab][c] != table[a][table[b][c]]) {
                                      detail = "associativity";
                                      return false;
                                  }
                          }
                      (void)D;
                      return true;
                  });

    // ---- 11: delay machinery ----------------------------------------------------
    run_criterion(11, "delay axioms, diagonal rank, formal dimension", 0,
                  [&](std::string& detail) {
                      for (int d = 1; d <= 4; ++d) {
                          DelayFamily fam = construct_delays(d);
                          DelayReport r = check_delay_compatibility(fam);
                          if (!r.ok) {
                              detail = "axioms d=" + std::to_string(d);
                              return false;
                          }
                          for (const auto& [key, a] : fam.by_type) {
                              if (flavor(a.tree) != Flavor::biquilted) continue;
                              FlatTree f = flatten(a.tree);
                              size_t k = designated_vertices(a.tree, f).size();
                              if (k < 2) continue;
                              DiagonalSolution sol = delayed_diagonal(a.tree, a);
                              if (sol.rank != static_cast<int>(k) - 1) {
                                  detail = "rank d=" + std::to_string(d);
                                  return false;
                              }
                          }
                      }
                      FormalModuliDims regular{{0, 1, 1, 0}, {1, 2, 3}};
                      FormalModuliDims doubled{{2, 0, 0}, {1, 2}};
                      if (formal_dimension(regular) != 0 ||
                          !zero_bubble_index(regular).has_value() ||
                          *zero_bubble_index(regular) != 2 ||
                          zero_bubble_index(doubled).has_value()) {
                          detail = "formal dimension bookkeeping";
                          return false;
                      }
                      return true;
                  });

    std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "OK" : "FAILED",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
