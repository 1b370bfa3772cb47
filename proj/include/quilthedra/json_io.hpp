#ifndef QUILTHEDRA_JSON_IO_HPP
#define QUILTHEDRA_JSON_IO_HPP

#include <quilthedra/ainfty.hpp>
#include <quilthedra/gluing.hpp>
#include <quilthedra/polytopes.hpp>
#include <quilthedra/relations.hpp>
#include <quilthedra/trees.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

namespace quilthedra {

// ordered_json keeps insertion order, so identical inputs serialize to
// byte-identical output
using json = nlohmann::ordered_json;

// -------------------------------------------------------------------------
// Trees: {family, d, e, vertices, edges, leaves}
// -------------------------------------------------------------------------

namespace detail {

inline std::string kind_name(VKind k) { return std::string(1, static_cast<char>(k)); }

inline std::string leaf_json_label(const FlatTree::V& v) {
    return (v.kind == VKind::tleaf ? "t" : "a") + std::to_string(v.label);
}

} // namespace detail

inline json tree_to_json(const Tree& t) {
    FlatTree f = flatten(t);
    json vertices = json::array();
    json edges = json::array();
    json leaves = json::array();
    for (size_t i = 0; i < f.v.size(); ++i) {
        const auto& v = f.v[i];
        if (is_leaf_kind(v.kind)) {
            // leaves carry their own node id so planar sibling order survives
            leaves.push_back({{"label", detail::leaf_json_label(v)},
                              {"vertex", static_cast<int>(i)}});
        } else {
            // the colored field lists the seam slots of a quilted vertex, in
            // slot order, by node id
            json colored = json::array();
            for (int s = 0; s < v.seam_count; ++s) colored.push_back(v.children[s]);
            vertices.push_back({{"id", static_cast<int>(i)},
                                {"kind", detail::kind_name(v.kind)},
                                {"colored", colored}});
        }
        // edges include leaf attachments; child ids follow depth-first order,
        // so sorting a vertex's children by id restores the planar order
        if (v.parent >= 0) edges.push_back({v.parent, static_cast<int>(i)});
    }
    return {{"family", family_name(t.family)},
            {"d", t.d},
            {"e", t.e},
            {"vertices", vertices},
            {"edges", edges},
            {"leaves", leaves}};
}

inline Tree tree_from_json(const json& j) {
    auto fam = family_from_name(j.at("family").get<std::string>());
    if (!fam) throw std::invalid_argument("unknown family in tree JSON");
    std::map<int, json> verts;
    std::map<int, std::string> leaf_label;
    std::set<int> is_child;
    std::map<int, std::vector<int>> child_ids;
    for (const auto& v : j.at("vertices")) verts[v.at("id").get<int>()] = v;
    if (verts.empty()) throw std::invalid_argument("tree JSON without vertices");
    for (const auto& l : j.at("leaves"))
        leaf_label[l.at("vertex").get<int>()] = l.at("label").get<std::string>();
    for (const auto& e : j.at("edges")) {
        child_ids[e.at(0).get<int>()].push_back(e.at(1).get<int>());
        is_child.insert(e.at(1).get<int>());
    }
    // child ids were assigned depth-first, so id order is planar order
    for (auto& [id, ch] : child_ids) std::sort(ch.begin(), ch.end());

    std::function<TreeNode(int)> build = [&](int id) -> TreeNode {
        if (auto it = leaf_label.find(id); it != leaf_label.end()) {
            const std::string& lab = it->second;
            TreeNode leaf = (lab[0] == 't') ? quilthedra::detail::leaf_t()
                                            : quilthedra::detail::leaf_a();
            leaf.label = std::stoi(lab.substr(1));
            return leaf;
        }
        const json& v = verts.at(id);
        TreeNode n;
        std::string k = v.at("kind").get<std::string>();
        if (k.size() != 1) throw std::invalid_argument("bad vertex kind");
        n.kind = static_cast<VKind>(k[0]);
        n.seam_count = static_cast<int>(v.at("colored").size());
        const auto& ch = child_ids[id];
        for (size_t s = 0; s < v.at("colored").size(); ++s)
            if (s >= ch.size() || v.at("colored")[s].get<int>() != ch[s])
                throw std::invalid_argument("seam slots must be the leading children");
        for (int cid : ch) n.ch.push_back(build(cid));
        return n;
    };
    int root = -1;
    for (const auto& [id, v] : verts)
        if (!is_child.count(id)) root = id;
    if (root < 0) throw std::invalid_argument("tree JSON has no root");
    Tree t;
    t.family = *fam;
    t.root = build(root);
    relabel(t);
    if (auto err = validate(t))
        throw std::invalid_argument("invalid tree JSON: " + *err);
    return t;
}

// -------------------------------------------------------------------------
// Face posets: {family, d, e, dim, faces, covers}
// -------------------------------------------------------------------------

inline json poset_to_json(const FacePoset& p) {
    json faces = json::array();
    for (size_t i = 0; i < p.faces.size(); ++i) {
        json f = {{"id", static_cast<int>(i)},
                  {"tree", tree_to_json(p.faces[i])},
                  {"dim", p.dims[i]}};
        if (p.dims[i] == p.dim - 1) f["facet_tag"] = facet_tag(p.faces[i]);
        faces.push_back(std::move(f));
    }
    json covers = json::array();
    if (p.has_covers)
        for (const auto& [lo, hi] : p.covers) covers.push_back({lo, hi});
    return {{"family", family_name(p.family)}, {"d", p.d},     {"e", p.e},
            {"dim", p.dim},                    {"faces", faces}, {"covers", covers}};
}

// Hasse diagram in DOT format (plain text graph output)
inline std::string poset_to_dot(const FacePoset& p) {
    std::string out = "digraph hasse {\n  rankdir=BT;\n";
    for (size_t i = 0; i < p.faces.size(); ++i)
        out += "  n" + std::to_string(i) + " [label=\"" +
               to_expression(p.faces[i]) + "\"];\n";
    for (const auto& [lo, hi] : p.covers)
        out += "  n" + std::to_string(lo) + " -> n" + std::to_string(hi) + ";\n";
    out += "}\n";
    return out;
}

// -------------------------------------------------------------------------
// Delay assignments: {d, entries:[{tree_id, edge, lambda:"p/q"}]}
// -------------------------------------------------------------------------

inline json delay_family_to_json(const DelayFamily& fam) {
    json entries = json::array();
    for (const auto& [key, a] : fam.by_type)
        for (const auto& [edge, lam] : a.lambda)
            entries.push_back({{"tree_id", key},
                               {"edge", {edge.first, edge.second}},
                               {"lambda", lam.str()}});
    return {{"d", fam.d}, {"entries", entries}};
}

// -------------------------------------------------------------------------
// A-infinity instances:
// {name, N, ring, objects, homs, mu, functors, prenats}
// -------------------------------------------------------------------------

inline json elem_to_json(const Elem& e) {
    json out = json::array();
    for (const auto& [b, c] : e) out.push_back({{"basis", b}, {"coef", c.str()}});
    return out;
}

inline Elem elem_from_json(const json& j) {
    Elem e;
    for (const auto& t : j)
        e[t.at("basis").get<std::string>()] =
            Rational::parse(t.at("coef").get<std::string>());
    return e;
}

inline json instance_to_json(const AInftyInstance& C) {
    json homs = json::array();
    for (const auto& [pair, mod] : C.homs) {
        json basis = json::array();
        for (size_t i = 0; i < mod.basis.size(); ++i)
            basis.push_back({{"name", mod.basis[i]}, {"deg", mod.deg[i]}});
        homs.push_back({{"src", pair.first}, {"dst", pair.second}, {"basis", basis}});
    }
    json mu = json::array();
    for (const auto& [key, out] : C.mu) {
        if (out.empty()) continue;
        mu.push_back({{"d", key.first}, {"inputs", key.second},
                      {"output", elem_to_json(out)}});
    }
    return {{"name", C.name}, {"N", C.N},   {"ring", ring_name(C.ring)},
            {"objects", C.objects}, {"homs", homs}, {"mu", mu},
            {"functors", json::array()}, {"prenats", json::array()}};
}

inline json table_to_json(const std::map<TableKey, Elem>& table) {
    json out = json::array();
    for (const auto& [key, e] : table) {
        if (e.empty()) continue;
        out.push_back({{"d", key.first}, {"inputs", key.second},
                       {"output", elem_to_json(e)}});
    }
    return out;
}

inline json functor_to_json(const AFunctor& F) {
    json obj = json::object();
    for (const auto& [s, t] : F.obj) obj[s] = t;
    return {{"name", F.name}, {"target", F.dst->name}, {"obj", obj},
            {"table", table_to_json(F.table)}};
}

inline json prenat_to_json(const PreNat& T, bool homotopy) {
    return {{"name", T.name}, {"f1", T.f1.name}, {"f2", T.f2.name},
            {"deg", T.degT}, {"homotopy", homotopy},
            {"table", table_to_json(T.table)}};
}

inline AInftyInstance instance_from_json(const json& j) {
    AInftyInstance C;
    C.name = j.at("name").get<std::string>();
    C.N = j.at("N").get<int>();
    auto r = ring_from_name(j.at("ring").get<std::string>());
    if (!r) throw std::invalid_argument(C.name + ": unknown ring");
    C.ring = *r;
    for (const auto& o : j.at("objects")) C.objects.push_back(o.get<std::string>());
    for (const auto& h : j.at("homs")) {
        GradedModule m;
        for (const auto& b : h.at("basis")) {
            m.basis.push_back(b.at("name").get<std::string>());
            m.deg.push_back(b.at("deg").get<int>());
        }
        C.homs[{h.at("src").get<std::string>(), h.at("dst").get<std::string>()}] =
            std::move(m);
    }
    for (const auto& t : j.at("mu")) {
        std::vector<std::string> in;
        for (const auto& x : t.at("inputs")) in.push_back(x.get<std::string>());
        C.mu[{t.at("d").get<int>(), in}] = elem_from_json(t.at("output"));
    }
    C.finalize();
    return C;
}

// A bundle of instances plus the functors and pre-natural transformations
// between them, loaded from one fixtures directory.  Functors live in the
// JSON file of their source instance and name their target.
struct FixtureSet {
    std::map<std::string, AInftyInstance> instances;
    std::map<std::string, AFunctor> functors;
    std::map<std::string, PreNat> prenats;
    std::map<std::string, bool> prenat_is_homotopy;  // declared expectation
};

inline std::map<TableKey, Elem> table_from_json(const json& j) {
    std::map<TableKey, Elem> table;
    for (const auto& t : j) {
        std::vector<std::string> in;
        for (const auto& x : t.at("inputs")) in.push_back(x.get<std::string>());
        table[{t.at("d").get<int>(), in}] = elem_from_json(t.at("output"));
    }
    return table;
}

inline void load_fixture_file(FixtureSet& fx, const json& j) {
    AInftyInstance C = instance_from_json(j);
    auto [it, ok] = fx.instances.emplace(C.name, std::move(C));
    if (!ok) throw std::invalid_argument("duplicate instance " + it->first);
}

inline void link_fixture_file(FixtureSet& fx, const json& j) {
    const AInftyInstance& src = fx.instances.at(j.at("name").get<std::string>());
    for (const auto& fj : j.at("functors")) {
        AFunctor F;
        F.name = fj.at("name").get<std::string>();
        F.src = &src;
        auto dit = fx.instances.find(fj.at("target").get<std::string>());
        if (dit == fx.instances.end())
            throw std::invalid_argument(F.name + ": unknown target instance");
        F.dst = &dit->second;
        for (auto it = fj.at("obj").begin(); it != fj.at("obj").end(); ++it)
            F.obj[it.key()] = it.value().get<std::string>();
        F.table = table_from_json(fj.at("table"));
        validate_functor(F);
        if (!fx.functors.emplace(F.name, std::move(F)).second)
            throw std::invalid_argument("duplicate functor name in fixtures");
    }
    for (const auto& tj : j.at("prenats")) {
        PreNat T;
        T.name = tj.at("name").get<std::string>();
        T.f1 = fx.functors.at(tj.at("f1").get<std::string>());
        T.f2 = fx.functors.at(tj.at("f2").get<std::string>());
        T.degT = tj.at("deg").get<int>();
        T.table = table_from_json(tj.at("table"));
        validate_prenat(T);
        fx.prenat_is_homotopy[T.name] =
            tj.contains("homotopy") && tj.at("homotopy").get<bool>();
        if (!fx.prenats.emplace(T.name, std::move(T)).second)
            throw std::invalid_argument("duplicate prenat name in fixtures");
    }
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

inline FixtureSet load_fixtures(const std::filesystem::path& dir) {
    FixtureSet fx;
    std::vector<json> files;
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".json") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        json j = read_json_file(p);
        if (!j.contains("homs")) continue;  // not an instance file
        files.push_back(j);
        load_fixture_file(fx, j);
    }
    for (const auto& j : files) link_fixture_file(fx, j);
    return fx;
}

// -------------------------------------------------------------------------
// Relations: {spaces:[{label, elements}], correspondences:[{src,dst,pairs,width,brane}]}
// -------------------------------------------------------------------------

struct RelationSetup {
    std::map<std::string, FiniteSpace> spaces;
    std::vector<Correspondence> correspondences;
};

inline json relation_setup_to_json(const RelationSetup& r) {
    json spaces = json::array();
    for (const auto& [label, M] : r.spaces)
        spaces.push_back({{"label", label}, {"elements", M.elements}});
    json corrs = json::array();
    for (const auto& L : r.correspondences) {
        json pairs = json::array();
        for (const auto& [a, b] : L.relation) pairs.push_back({a, b});
        corrs.push_back({{"src", L.src.label}, {"dst", L.dst.label},
                         {"pairs", pairs}, {"width", L.width.str()},
                         {"brane", L.brane}});
    }
    return {{"spaces", spaces}, {"correspondences", corrs}};
}

inline RelationSetup relation_setup_from_json(const json& j) {
    RelationSetup r;
    for (const auto& s : j.at("spaces")) {
        FiniteSpace M;
        M.label = s.at("label").get<std::string>();
        for (const auto& e : s.at("elements")) M.elements.push_back(e.get<std::string>());
        r.spaces[M.label] = M;
    }
    for (const auto& c : j.at("correspondences")) {
        Correspondence L;
        L.src = r.spaces.at(c.at("src").get<std::string>());
        L.dst = r.spaces.at(c.at("dst").get<std::string>());
        for (const auto& p : c.at("pairs"))
            L.relation.insert({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
        L.width = Rational::parse(c.at("width").get<std::string>());
        L.brane = c.at("brane").get<std::string>();
        validate_correspondence(L);
        r.correspondences.push_back(std::move(L));
    }
    return r;
}

} // namespace quilthedra

#endif // QUILTHEDRA_JSON_IO_HPP
