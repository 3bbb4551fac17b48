#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <killrange/harness.hpp>
#include <killrange/json_io.hpp>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace killrange;

namespace {

struct Config {
    std::string out;
    std::string cache_dir;
    std::string seeds_csv = "1,2,3";
    int degree = 3;
    bool no_cache = false;
};

std::vector<unsigned long> parse_seeds(const std::string& csv) {
    std::vector<unsigned long> seeds;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        size_t pos = 0;
        unsigned long v = std::stoul(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("bad seed: " + tok);
        seeds.push_back(v);
    }
    if (seeds.empty()) throw std::invalid_argument("empty seed list");
    return seeds;
}

json load_json_arg(const std::string& arg) {
    std::string text = arg;
    if (fs::exists(arg)) {
        std::ifstream in(arg);
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw std::invalid_argument("not valid JSON (nor a readable file): " +
                                    arg);
    return j;
}

fs::path cache_directory(const Config& cfg) {
    if (const char* env = std::getenv("KILLRANGE_CACHE")) return env;
    if (!cfg.cache_dir.empty()) return cfg.cache_dir;
    if (const char* home = std::getenv("HOME"))
        return fs::path(home) / ".cache" / "killrange";
    return fs::temp_directory_path() / "killrange-cache";
}

std::string fnv1a(const std::string& s) {
    unsigned long long h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", h);
    return buf;
}

void emit(const Config& cfg, const json& j) {
    if (cfg.out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(cfg.out);
    if (!out) throw std::invalid_argument("cannot open output: " + cfg.out);
    out << j.dump(2) << "\n";
}

/// Content-addressed report cache: one JSON file per (command, canonical
/// spec, parameters).
json with_cache(const Config& cfg, const std::string& command,
                const SpaceSpec& spec, const std::string& params,
                const std::function<json()>& compute) {
    if (cfg.no_cache) return compute();
    fs::path dir = cache_directory(cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path file =
        dir / (command + "-" + content_hash(spec) + "-" + fnv1a(params) +
               ".json");
    if (fs::exists(file)) {
        std::ifstream in(file);
        json j = json::parse(in, nullptr, false);
        if (!j.is_discarded()) return j;
    }
    json j = compute();
    std::ofstream out(file);
    if (out) out << j.dump() << "\n";
    return j;
}

json describe_report(const SpaceSpec& spec) {
    auto [np, nq] = spec.signature_counts();
    json factors = json::array();
    for (const FactorClass& f : classify(spec))
        factors.push_back({{"tag", factor_tag_name(f.tag)},
                           {"parallel_vector", f.has_parallel_vector}});
    return {{"spec", spec_to_json(canonical_spec(spec))},
            {"dim", spec.dim()},
            {"signature", {np, nq}},
            {"lorentzian", spec.is_lorentzian()},
            {"factors", factors}};
}

json filtration_block(const Filtration& f, bool parallel) {
    json j = filtration_report(f, parallel);
    json steps = json::array();
    for (const Subspace& s : f.steps) steps.push_back(subspace_to_json(s));
    j["steps"] = steps;
    return j;
}

json filtration_command(const SpaceSpec& spec) {
    PointFrame pf = build_point_frame(spec);
    bool parallel = parallelness_check(pf).parallel;
    return {{"E", filtration_block(E_filtration(pf), parallel)},
            {"h", filtration_block(h_filtration(pf), parallel)}};
}

json witness_report(const SpaceSpec& spec) {
    WitnessReport w = nonexactness_witness(spec);
    return {{"h", tensor_to_json(w.h)},
            {"psi", tensor_to_json(w.psi)},
            {"mu", tensor_to_json(w.mu)},
            {"phi", tensor_to_json(w.phi)},
            {"residual_zero", w.residual.is_zero()},
            {"obstruction", tensor_to_json(w.obstruction)}};
}

json cw_report(const Matrix& Q) {
    CWStructure s = cw_structure(Q);
    return {{"h_dims", s.h_dims},
            {"E_dims", s.E_dims},
            {"exact", s.exact},
            {"hol", subspace_to_json(s.hol)},
            {"h0", subspace_to_json(s.h0)},
            {"h1", subspace_to_json(s.h1)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact engine for the Killing connection on locally "
                 "symmetric spaces"};
    app.require_subcommand(1);
    Config cfg;
    app.add_option("--out", cfg.out, "write the JSON report to PATH")
        ->capture_default_str();
    app.add_option("--seeds", cfg.seeds_csv, "comma-separated PRNG seeds")
        ->capture_default_str();
    app.add_option("--degree", cfg.degree, "polynomial degree bound (max 3)")
        ->capture_default_str();
    app.add_flag("--no-cache", cfg.no_cache, "bypass the report cache");
    app.add_option("--cache-dir", cfg.cache_dir,
                   "cache directory (KILLRANGE_CACHE overrides)");

    std::string spec_arg, q_arg;
    auto* describe =
        app.add_subcommand("describe", "factor classification of a spec");
    describe->fallthrough();
    describe->add_option("spec", spec_arg, "spec JSON or path")->required();
    auto* filtration =
        app.add_subcommand("filtration", "E_k and h_k filtrations");
    filtration->fallthrough();
    filtration->add_option("spec", spec_arg, "spec JSON or path")->required();
    auto* exactness =
        app.add_subcommand("exactness", "exactness verdict (Theorem 6.2)");
    exactness->fallthrough();
    exactness->add_option("spec", spec_arg, "spec JSON or path")->required();
    auto* witness =
        app.add_subcommand("witness", "non-exactness witness section");
    witness->fallthrough();
    witness->add_option("spec", spec_arg, "spec JSON or path")->required();
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->fallthrough();
    verify->add_option("spec", spec_arg, "spec JSON or path")->required();
    auto* cw = app.add_subcommand("cw", "Cahen-Wallach structure for Q");
    cw->fallthrough();
    cw->add_option("Q", q_arg, "symmetric matrix JSON or path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cfg.degree < 0 || cfg.degree > 3)
            throw std::invalid_argument("--degree must be between 0 and 3");
        std::vector<unsigned long> seeds = parse_seeds(cfg.seeds_csv);

        if (cw->parsed()) {
            Matrix Q = matrix_from_json(load_json_arg(q_arg));
            SpaceSpec spec = SpaceSpec::cahen_wallach(Q);
            emit(cfg, with_cache(cfg, "cw", spec, "",
                                 [&] { return cw_report(Q); }));
            return 0;
        }

        SpaceSpec spec = spec_from_json(load_json_arg(spec_arg));
        if (describe->parsed()) {
            emit(cfg, with_cache(cfg, "describe", spec, "",
                                 [&] { return describe_report(spec); }));
            return 0;
        }
        if (filtration->parsed()) {
            emit(cfg, with_cache(cfg, "filtration", spec, "",
                                 [&] { return filtration_command(spec); }));
            return 0;
        }
        if (exactness->parsed()) {
            emit(cfg, with_cache(cfg, "exactness", spec, "",
                                 [&] { return verdict_json(verdict(spec)); }));
            return 0;
        }
        if (witness->parsed()) {
            emit(cfg, with_cache(cfg, "witness", spec, "",
                                 [&] { return witness_report(spec); }));
            return 0;
        }
        // verify: parameters are part of the cache key
        std::string params =
            "seeds=" + cfg.seeds_csv + ";degree=" + std::to_string(cfg.degree);
        json rep = with_cache(cfg, "verify", spec, params, [&] {
            return run_suite(spec, seeds, cfg.degree).to_json();
        });
        emit(cfg, rep);
        return rep.value("pass", false) ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        emit(cfg, json{{"error", e.what()}});
        return 2;
    } catch (const std::exception& e) {
        emit(cfg, json{{"error", e.what()}});
        return 1;
    }
}
