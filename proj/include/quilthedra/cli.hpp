#ifndef QUILTHEDRA_CLI_HPP
#define QUILTHEDRA_CLI_HPP

#include <quilthedra/bijections.hpp>
#include <quilthedra/json_io.hpp>
#include <quilthedra/signs.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace quilthedra::cli {

// Accumulates named checks; renders to JSON or plain text.  The wall-time
// field is emitted last so reports stay byte-comparable up to it.
struct Report {
    std::string command;
    long cases = 0;
    std::vector<std::string> failures;
    json info = json::object();
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void check(const std::string& name, bool ok) {
        ++cases;
        if (!ok) failures.push_back(name);
    }
    void absorb(const std::string& prefix, const CheckReport& r) {
        cases += r.cases;
        for (const auto& f : r.failures) failures.push_back(prefix + ": " + f);
    }
    bool ok() const { return failures.empty(); }

    long elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    }

    void render(std::ostream& os, const std::string& format) const {
        if (format == "json") {
            json out = {{"command", command}, {"cases", cases}, {"failures", failures}};
            for (const auto& [k, v] : info.items()) out[k] = v;
            out["wall_time_ms"] = elapsed_ms();
            os << out.dump(2) << "\n";
        } else {
            os << "command: " << command << "\n";
            for (const auto& [k, v] : info.items())
                os << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump())
                   << "\n";
            for (const auto& f : failures) os << "FAIL " << f << "\n";
            os << "cases: " << cases << "\nfailures: " << failures.size() << "\n"
               << "wall_time_ms: " << elapsed_ms() << "\n";
        }
    }
};

namespace detail {

inline Family parse_family(const std::string& s) {
    auto f = family_from_name(s);
    if (!f) throw CLI::ValidationError("--family", "unknown family: " + s);
    return *f;
}

inline std::string fixtures_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("QUILTHEDRA_FIXTURES")) return env;
    throw CLI::ValidationError("--fixtures",
                               "no fixtures directory (flag or QUILTHEDRA_FIXTURES)");
}

inline void for_each_composition(int d, const std::function<void(const std::vector<int>&)>& cb) {
    std::vector<int> acc;
    std::function<void(int)> rec = [&](int rest) {
        if (rest == 0) { cb(acc); return; }
        for (int f = 1; f <= rest; ++f) {
            acc.push_back(f);
            rec(rest - f);
            acc.pop_back();
        }
    };
    rec(d);
}

// -------------------------------------------------------------------------
// per-subcommand bodies, shared with verify-all
// -------------------------------------------------------------------------

inline void run_signs(Report& rep, const std::string& which, int dmax) {
    if (which == "assoc" || which == "all") {
        for (int d = 1; d <= dmax; ++d)
            for (int m = 1; m <= d; ++m)
                for (int n = 0; n + m <= d; ++n)
                    rep.check("assoc d=" + std::to_string(d) + " n=" + std::to_string(n) +
                                  " m=" + std::to_string(m),
                              assoc_sign_identity(d, n, m));
    }
    if (which == "functor" || which == "all") {
        for (int d = 1; d <= dmax; ++d)
            for_each_composition(d, [&](const std::vector<int>& blocks) {
                rep.check("functor d=" + std::to_string(d) + " blocks=" +
                              std::to_string(blocks.size()),
                          functor_sign_identity(d, blocks));
            });
    }
    if (which == "jacobian" || which == "all") {
        int jmax = std::min(dmax, 5);
        for (int d = 3; d <= jmax; ++d)
            for (int m = 2; m <= d; ++m)
                for (int n = 0; n + m <= d; ++n) {
                    if (n == 0 && m == d) continue;
                    GluingMapSpec s;
                    s.kind = GluingMapSpec::Kind::assoc;
                    s.d = d; s.n = n; s.m = m;
                    rep.check("jacobian assoc d=" + std::to_string(d),
                              gluing_orientation_sign(s) == closed_form_sign(s));
                }
        for (int d = 2; d <= jmax; ++d)
            for (int i = 2; i <= d; ++i)
                for (int j = 0; i + j <= d; ++j) {
                    GluingMapSpec s;
                    s.kind = GluingMapSpec::Kind::multiplihedron_unquilted;
                    s.d = d; s.i = i; s.j = j;
                    rep.check("jacobian unquilted d=" + std::to_string(d),
                              gluing_orientation_sign(s) == closed_form_sign(s));
                }
        for (int d = 2; d <= jmax; ++d)
            for_each_composition(d, [&](const std::vector<int>& blocks) {
                if (blocks.size() < 2) return;
                GluingMapSpec s;
                s.kind = GluingMapSpec::Kind::multiplihedron_quilted;
                s.d = d;
                s.blocks = blocks;
                rep.check("jacobian quilted d=" + std::to_string(d),
                          gluing_orientation_sign(s) == closed_form_sign(s));
            });
    }
}

inline void run_ainfty(Report& rep, const std::string& dir, int dmax) {
    FixtureSet fx = load_fixtures(dir);
    for (const auto& [name, C] : fx.instances)
        rep.absorb("ainfty " + name, check_ainfty(C, dmax));
    for (const auto& [name, F] : fx.functors)
        rep.absorb("functor " + name, check_functor(F, dmax));
    for (const auto& [name, T] : fx.prenats) {
        if (!fx.prenat_is_homotopy.at(name)) continue;
        CheckReport r;
        bool ok = is_homotopy(T, T.f1, T.f2, &r);
        rep.cases += std::max<long>(r.cases, 1);
        if (!ok)
            for (const auto& f : r.failures)
                rep.failures.push_back("homotopy " + name + ": " + f);
    }
}

inline void run_relations(Report& rep, const std::string& dir) {
    RelationSetup r = relation_setup_from_json(read_json_file(dir + "/relations.json"));
    for (const auto& L : r.correspondences) {
        Composition right = geometric_compose(L, diagonal(L.dst));
        Composition left = geometric_compose(diagonal(L.src), L);
        rep.check("diag identity " + L.brane,
                  right.relation == L.relation && right.embedded &&
                      left.relation == L.relation && left.embedded);
        rep.check("transpose involution " + L.brane, transpose(transpose(L)) == L);
    }
    // all composable pairs/triples in the file
    for (const auto& A : r.correspondences)
        for (const auto& B : r.correspondences) {
            if (!(A.dst == B.src)) continue;
            Composition c = geometric_compose(A, B);
            rep.check("fiber size " + A.brane + ";" + B.brane,
                      c.fiber_product_size >= static_cast<long>(c.relation.size()));
            for (const auto& C : r.correspondences) {
                if (!(B.dst == C.src)) continue;
                auto lhs = geometric_compose(composed_correspondence(A, B), C);
                auto rhs = geometric_compose(A, composed_correspondence(B, C));
                rep.check("assoc " + A.brane + ";" + B.brane + ";" + C.brane,
                          lhs.relation == rhs.relation);
            }
        }
}

inline void run_delays(Report& rep, int dmax) {
    for (int d = 1; d <= dmax; ++d) {
        DelayFamily fam = construct_delays(d);
        DelayReport r = check_delay_compatibility(fam);
        ++rep.cases;
        if (!r.ok)
            for (const auto& v : r.violations)
                rep.failures.push_back("delays d=" + std::to_string(d) + ": " + v);
    }
}

inline void run_bijections(Report& rep, int dmax) {
    struct Row { const char* identity; int d_lo; int d_cap; int e; };
    for (const Row& row : {Row{"assoc", 3, 6, 0}, Row{"functor", 2, 5, 0},
                           Row{"prenat-mu1", 1, 4, 1}, Row{"homotopy", 1, 4, 0}}) {
        for (int d = row.d_lo; d <= std::min(dmax, row.d_cap); ++d) {
            BijectionReport b = term_facet_correspondence(row.identity, d, row.e);
            rep.check(std::string(row.identity) + " d=" + std::to_string(d), b.ok);
        }
    }
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& os = std::cout,
               std::ostream& es = std::cerr) {
    CLI::App app{"quilthedra: polytope enumeration and verification suites"};
    app.require_subcommand(1);

    std::string family = "stable", format = "json", fixtures, out_path, verb;
    int d = 2, e = 0, dmax = 4;
    bool dot = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--out", out_path);
    };

    auto* c_enum = app.add_subcommand("enumerate", "list tree types");
    c_enum->add_option("--family", family);
    c_enum->add_option("--d", d);
    c_enum->add_option("--e", e);
    add_common(c_enum);

    auto* c_faces = app.add_subcommand("faces", "f-vector and Euler check");
    c_faces->add_option("--family", family);
    c_faces->add_option("--d", d);
    c_faces->add_option("--e", e);
    c_faces->add_flag("--dot", dot, "emit the Hasse diagram in DOT format");
    add_common(c_faces);

    auto* c_facets = app.add_subcommand("facets", "facet families and codimensions");
    c_facets->add_option("--family", family);
    c_facets->add_option("--d", d);
    c_facets->add_option("--e", e);
    add_common(c_facets);

    auto* c_signs = app.add_subcommand("signs", "sign-congruence suites");
    c_signs->add_option("verb", verb)->check(CLI::IsMember({"verify"}));
    c_signs->add_option("--family", family)
        ->check(CLI::IsMember({"assoc", "functor", "jacobian", "all"}));
    c_signs->add_option("--dmax", dmax);
    add_common(c_signs);

    auto* c_ainfty = app.add_subcommand("ainfty", "fixture verification");
    c_ainfty->add_option("--fixtures", fixtures);
    c_ainfty->add_option("--dmax", dmax);
    add_common(c_ainfty);

    auto* c_rel = app.add_subcommand("relations", "correspondence checks");
    c_rel->add_option("--fixtures", fixtures);
    add_common(c_rel);

    auto* c_delays = app.add_subcommand("delays", "delay compatibility axioms");
    c_delays->add_option("--dmax", dmax);
    add_common(c_delays);

    auto* c_all = app.add_subcommand("verify-all", "aggregate suites");
    c_all->add_option("--dmax", dmax);
    c_all->add_option("--fixtures", fixtures);
    add_common(c_all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& h) {
        os << app.help();
        return 0;
    } catch (const CLI::ParseError& pe) {
        es << pe.what() << "\n";
        return 2;  // unknown flags / bad arguments
    }

    Report rep;
    for (int i = 1; i < argc; ++i) rep.command += std::string(i > 1 ? " " : "") + argv[i];

    std::ofstream ofs;
    std::ostream* sink = &os;
    if (!out_path.empty()) {
        ofs.open(out_path);
        if (!ofs) { es << "cannot open " << out_path << "\n"; return 2; }
        sink = &ofs;
    }

    try {
        if (c_enum->parsed()) {
            Family fam = detail::parse_family(family);
            auto trees = enumerate_trees(fam, d, e);
            rep.cases = static_cast<long>(trees.size());
            rep.info["count"] = trees.size();
            json list = json::array();
            for (const auto& t : trees)
                list.push_back(format == "json" ? json(tree_to_json(t))
                                                : json(to_expression(t)));
            rep.info["trees"] = list;
        } else if (c_faces->parsed()) {
            FacePoset p = build_face_poset(detail::parse_family(family), d, e);
            if (dot) { *sink << poset_to_dot(p); return 0; }
            rep.info["dim"] = p.dim;
            rep.info["f_vector"] = f_vector(p);
            rep.check("euler", euler_check(p));
        } else if (c_facets->parsed()) {
            FacePoset p = build_face_poset(detail::parse_family(family), d, e,
                                           /*with_covers=*/false);
            rep.info["facet_families"] = facet_families(p);
            for (size_t i = 0; i < p.faces.size(); ++i)
                if (p.dims[i] == p.dim - 1)
                    rep.check("codim " + to_expression(p.faces[i]),
                              stratum_codim(p.faces[i]) == 1);
        } else if (c_signs->parsed()) {
            detail::run_signs(rep, c_signs->count("--family") ? family : "all",
                              c_signs->count("--dmax") ? dmax : 6);
        } else if (c_ainfty->parsed()) {
            detail::run_ainfty(rep, detail::fixtures_dir(fixtures), dmax);
        } else if (c_rel->parsed()) {
            detail::run_relations(rep, detail::fixtures_dir(fixtures));
        } else if (c_delays->parsed()) {
            detail::run_delays(rep, std::min(dmax, 4));
        } else if (c_all->parsed()) {
            for (Family fam : {Family::stable, Family::colored, Family::seam,
                               Family::bicolored}) {
                int lo = fam == Family::stable ? 2 : 1;
                for (int dd = lo; dd <= dmax; ++dd)
                    for (int ee = 0; ee <= (fam == Family::seam ? 2 : 0); ++ee) {
                        FacePoset p = build_face_poset(fam, dd, ee);
                        rep.check("euler " + std::string(family_name(fam)) +
                                      " d=" + std::to_string(dd) + " e=" + std::to_string(ee),
                                  euler_check(p));
                    }
            }
            detail::run_signs(rep, "all", dmax);
            detail::run_bijections(rep, dmax);
            detail::run_delays(rep, std::min(dmax, 4));
            std::string dir;
            if (!fixtures.empty()) dir = fixtures;
            else if (const char* env = std::getenv("QUILTHEDRA_FIXTURES")) dir = env;
            if (!dir.empty()) {
                detail::run_ainfty(rep, dir, dmax);
                detail::run_relations(rep, dir);
            }
        }
    } catch (const CLI::ValidationError& ve) {
        es << ve.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        es << "error: " << ex.what() << "\n";
        return 2;
    }

    rep.render(*sink, format);
    return rep.ok() ? 0 : 1;
}

} // namespace quilthedra::cli

#endif // QUILTHEDRA_CLI_HPP
