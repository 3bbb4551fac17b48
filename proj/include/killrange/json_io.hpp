#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <killrange/spaces.hpp>
#include <string>

namespace killrange {

inline nlohmann::json rat_to_json(const Rat& r) {
    if (r.get_den() == 1) {
        if (mpz_fits_slong_p(r.get_num().get_mpz_t()))
            return nlohmann::json(r.get_num().get_si());
        return r.get_num().get_str();
    }
    return r.get_str();  // "a/b"
}

inline Rat rat_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_string()) {
        Rat r;
        try {
            r = Rat(j.get<std::string>());
        } catch (const std::exception&) {
            throw std::invalid_argument("bad rational literal: " +
                                        j.get<std::string>());
        }
        if (r.get_den() == 0)
            throw std::invalid_argument("rational with zero denominator");
        r.canonicalize();
        return r;
    }
    throw std::invalid_argument("expected an integer or an \"a/b\" string");
}

inline nlohmann::json spec_to_json(const SpaceSpec& s) {
    using K = SpaceSpec::Kind;
    nlohmann::json j;
    switch (s.kind) {
        case K::Flat:
            j = {{"type", "flat"}, {"p", s.p}, {"q", s.q}};
            break;
        case K::ConstCurv:
            j = {{"type", "const_curv"},
                 {"p", s.p},
                 {"q", s.q},
                 {"sign", s.curvature_sign}};
            break;
        case K::Sphere:
            j = {{"type", "sphere"}, {"n", s.n}};
            if (s.hermitian) j["hermitian"] = true;
            break;
        case K::Hyperbolic:
            j = {{"type", "hyperbolic"}, {"n", s.n}};
            break;
        case K::CahenWallach: {
            nlohmann::json rows = nlohmann::json::array();
            for (int i = 0; i < s.Q.rows(); ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (int k = 0; k < s.Q.cols(); ++k)
                    row.push_back(rat_to_json(s.Q(i, k)));
                rows.push_back(std::move(row));
            }
            j = {{"type", "cahen_wallach"}, {"Q", rows}};
            break;
        }
        case K::Product: {
            nlohmann::json fs = nlohmann::json::array();
            for (const auto& f : s.factors) fs.push_back(spec_to_json(f));
            j = {{"type", "product"}, {"factors", fs}};
            break;
        }
    }
    return j;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("expected a nonempty matrix");
    const int n = int(j.size());
    Matrix m(n, int(j.at(0).size()));
    for (int i = 0; i < n; ++i) {
        if (!j.at(size_t(i)).is_array() ||
            int(j.at(size_t(i)).size()) != m.cols())
            throw std::invalid_argument("ragged matrix rows");
        for (int k = 0; k < m.cols(); ++k)
            m(i, k) = rat_from_json(j.at(size_t(i)).at(size_t(k)));
    }
    return m;
}

inline SpaceSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw std::invalid_argument("spec must be an object with a \"type\"");
    const std::string type = j["type"].get<std::string>();
    auto geti = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_number_integer())
            throw std::invalid_argument(std::string("missing integer field \"") +
                                        key + "\" for type " + type);
        return j[key].get<int>();
    };
    if (type == "flat") return SpaceSpec::flat(geti("p"), geti("q"));
    if (type == "const_curv") {
        int p = geti("p"), q = geti("q");
        return SpaceSpec::const_curv(p + q, p, q, geti("sign"));
    }
    if (type == "sphere") {
        bool herm = j.value("hermitian", false);
        return SpaceSpec::sphere(geti("n"), herm);
    }
    if (type == "hyperbolic") return SpaceSpec::hyperbolic(geti("n"));
    if (type == "cahen_wallach") {
        if (!j.contains("Q"))
            throw std::invalid_argument("cahen_wallach needs a \"Q\" matrix");
        return SpaceSpec::cahen_wallach(matrix_from_json(j["Q"]));
    }
    if (type == "product") {
        if (!j.contains("factors") || !j["factors"].is_array())
            throw std::invalid_argument("product needs a \"factors\" array");
        std::vector<SpaceSpec> fs;
        for (const auto& f : j["factors"]) fs.push_back(spec_from_json(f));
        return SpaceSpec::product(std::move(fs));
    }
    throw std::invalid_argument("unknown spec type: " + type);
}

/// Canonical form: nested products flattened, factors sorted by their
/// serialized form. Semantically equal specs canonicalize identically.
inline SpaceSpec canonical_spec(const SpaceSpec& s) {
    using K = SpaceSpec::Kind;
    if (s.kind != K::Product) return s;
    std::vector<SpaceSpec> leaves;
    std::function<void(const SpaceSpec&)> flatten = [&](const SpaceSpec& f) {
        if (f.kind == K::Product)
            for (const auto& g : f.factors) flatten(g);
        else
            leaves.push_back(f);
    };
    flatten(s);
    std::sort(leaves.begin(), leaves.end(),
              [](const SpaceSpec& a, const SpaceSpec& b) {
                  return spec_to_json(a).dump() < spec_to_json(b).dump();
              });
    return SpaceSpec::product(std::move(leaves));
}

/// Content hash of the canonicalized spec (FNV-1a 64, fixed across runs).
inline std::string content_hash(const SpaceSpec& s) {
    const std::string dump = spec_to_json(canonical_spec(s)).dump();
    unsigned long long h = 14695981039346656037ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", h);
    return buf;
}

inline nlohmann::json tensor_to_json(const Tensor& t) {
    nlohmann::json val = nlohmann::json::array();
    for (Slot s : t.valence()) val.push_back(s == Slot::Up ? "up" : "down");
    std::function<nlohmann::json(std::vector<int>&, int)> build =
        [&](std::vector<int>& idx, int depth) -> nlohmann::json {
        if (depth == t.order()) return t.at(idx).str();
        nlohmann::json arr = nlohmann::json::array();
        for (int i = 0; i < t.dim(); ++i) {
            idx.push_back(i);
            arr.push_back(build(idx, depth + 1));
            idx.pop_back();
        }
        return arr;
    };
    std::vector<int> idx;
    return {{"valence", val}, {"components", build(idx, 0)}};
}

inline nlohmann::json subspace_to_json(const Subspace& s) {
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& v : s.basis()) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& r : v) row.push_back(rat_to_json(r));
        basis.push_back(std::move(row));
    }
    return {{"ambient", s.ambient()}, {"dim", s.dim()}, {"basis", basis}};
}

}  // namespace killrange
