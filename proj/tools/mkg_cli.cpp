// mkg: Maxwell-Klein-Gordon simulator in Lorenz gauge on the flat torus.
// Subcommands: run, check-identities, probe, info.
// Exit codes: 0 ok, 1 config error, 2 blow-up (partial outputs kept),
// 3 identity failure, 4 probe grew where admissibility promised bounded.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mkg/mkg.hpp"

using json = nlohmann::json;
using namespace mkg;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
    int dimension = 2;
    int N = 32;
    double dt = 2e-3;
    double T = 0.5;
    std::string scheme = "rk4";
    double mass = 1.0;
    std::string data_type = "preset";  // preset | seed | snapshot
    std::string data_name = "smalldata-n2";
    std::string data_path;
    std::uint64_t seed = 20240;
    double amplitude = 0.75;
    bool neutralize = true;
    SobolevExponents exps{1.2, 1.0, 0.05};
    int cadence = 10;
    int snapshot_cadence = 0;  // 0: only final
    bool coevolve_faraday = true;
    std::string output_dir = "mkg_out";
    bool strict_exponents = false;

    json to_json() const {
        return json{{"dimension", dimension},
                    {"grid", {{"N", N}}},
                    {"dt", dt},
                    {"T", T},
                    {"scheme", scheme},
                    {"mass", mass},
                    {"data", {{"type", data_type}, {"name", data_name}, {"path", data_path},
                              {"seed", seed}, {"amplitude", amplitude}, {"neutralize", neutralize}}},
                    {"exponents", {{"s", exps.s}, {"r", exps.r}, {"epsilon", exps.epsilon}}},
                    {"cadence", cadence},
                    {"snapshot_cadence", snapshot_cadence},
                    {"coevolve_faraday", coevolve_faraday},
                    {"output_dir", output_dir},
                    {"strict_exponents", strict_exponents}};
    }
};

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

RunConfig parse_config(const std::string& path) {
    RunConfig c;
    if (path.empty()) return c;
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot read " + path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    read_field(j, "dimension", c.dimension);
    if (j.contains("grid")) read_field(j.at("grid"), "N", c.N);
    read_field(j, "N", c.N);
    read_field(j, "dt", c.dt);
    read_field(j, "T", c.T);
    read_field(j, "scheme", c.scheme);
    read_field(j, "mass", c.mass);
    if (j.contains("data")) {
        const auto& d = j.at("data");
        read_field(d, "type", c.data_type);
        read_field(d, "name", c.data_name);
        read_field(d, "path", c.data_path);
        read_field(d, "seed", c.seed);
        read_field(d, "amplitude", c.amplitude);
        read_field(d, "neutralize", c.neutralize);
    }
    if (j.contains("exponents")) {
        const auto& e = j.at("exponents");
        read_field(e, "s", c.exps.s);
        read_field(e, "r", c.exps.r);
        read_field(e, "epsilon", c.exps.epsilon);
    }
    read_field(j, "cadence", c.cadence);
    read_field(j, "snapshot_cadence", c.snapshot_cadence);
    read_field(j, "coevolve_faraday", c.coevolve_faraday);
    read_field(j, "output_dir", c.output_dir);
    read_field(j, "strict_exponents", c.strict_exponents);
    return c;
}

InitialData make_run_data(const RunConfig& c, const TorusGrid& g) {
    if (c.data_type == "preset") return make_preset_data(c.data_name, g, c.seed);
    if (c.data_type == "seed") {
        auto rng0 = rng_stream(c.seed, 0x30ull);
        auto rng1 = rng_stream(c.seed, 0x31ull);
        SpectralScalar phi0 = random_field(g, rng0, {c.amplitude, 0.0, false});
        SpectralScalar phi1 = random_field(g, rng1, {c.amplitude, 0.0, false});
        BuildOptions opt;
        opt.neutralize_charge = c.neutralize;
        opt.seed_amplitude = c.amplitude;
        opt.seed = c.seed;
        return build_data(phi0, phi1, c.seed, opt);
    }
    if (c.data_type == "snapshot") {
        MKGState s = load_snapshot(c.data_path);
        if (s.grid.n != g.n || s.grid.N != g.N)
            throw std::invalid_argument("data.path: snapshot grid mismatch (config grid.N / dimension)");
        InitialData d;
        d.phi0 = s.phi;
        d.phi1 = s.phi_t;
        d.a0 = s.a;
        d.a0dot = s.a_t;
        d.F0 = faraday_from_potential(s);
        d.residuals = verify_constraints(d);
        return d;
    }
    throw std::invalid_argument("data.type: unknown data source '" + c.data_type + "'");
}

int cmd_run(const RunConfig& c) {
    TorusGrid g(c.dimension, c.N);

    auto violated = c.exps.violated(c.dimension);
    if (!violated.empty()) {
        std::ostream& os = c.strict_exponents ? std::cerr : std::cout;
        os << (c.strict_exponents ? "error" : "warning")
           << ": Theorem-1 exponent admissibility fails for exponents.{s,r,epsilon}:\n";
        for (const auto& v : violated) os << "  violated: " << v << "\n";
        if (c.strict_exponents) return 1;
    }

    SchemeSpec scheme;
    scheme.dt = c.dt;
    if (c.scheme == "rk4")
        scheme.kind = SchemeSpec::Kind::RK4;
    else if (c.scheme == "gautschi")
        scheme.kind = SchemeSpec::Kind::Gautschi;
    else
        throw std::invalid_argument("scheme: must be rk4 or gautschi");

    fs::create_directories(c.output_dir);
    InitialData data = make_run_data(c, g);

    // sidecar for the initial data
    {
        json side;
        side["dropped_charge"] = data.dropped_charge;
        for (auto& [k, v] : data.residuals) side["residuals"][k] = v;
        std::ofstream os(fs::path(c.output_dir) / "initial_data.json");
        os << side.dump(2) << "\n";
    }
    save_snapshot((fs::path(c.output_dir) / "initial.mkgs").string(), data.to_state(c.mass));

    EvolveOptions opt;
    opt.cadence = c.cadence;
    opt.coevolve_faraday = c.coevolve_faraday;
    opt.exps = c.exps;
    long snap_counter = 0;
    if (c.snapshot_cadence > 0) {
        opt.observer = [&](const SystemState& s) {
            if (snap_counter++ % c.snapshot_cadence == 0) {
                char name[64];
                std::snprintf(name, sizeof name, "state_t%.6f.mkgs", s.mkg.t);
                save_snapshot((fs::path(c.output_dir) / name).string(), s.mkg);
            }
        };
    }

    EvolveResult res = evolve(data, c.T, scheme, opt);

    write_series_csv((fs::path(c.output_dir) / "diagnostics.csv").string(), res.series);
    {
        std::ofstream os(fs::path(c.output_dir) / "diagnostics.json");
        os << series_json(res.series) << "\n";
    }
    save_snapshot((fs::path(c.output_dir) / "final.mkgs").string(), res.final_state.mkg);
    {
        json manifest;
        manifest["config"] = c.to_json();
        manifest["result"] = {{"blew_up", res.blew_up},
                              {"max_gauge_residual", res.max_gauge_residual},
                              {"max_faraday_gap", res.max_faraday_gap},
                              {"final_time", res.final_state.mkg.t},
                              {"dropped_charge", data.dropped_charge}};
        std::ofstream os(fs::path(c.output_dir) / "manifest.json");
        os << manifest.dump(2) << "\n";
    }

    std::cout << "run finished at t = " << format_double(res.final_state.mkg.t)
              << ", max gauge residual " << format_double(res.max_gauge_residual)
              << ", outputs in " << c.output_dir << "\n";
    if (res.blew_up) {
        std::cout << "blow-up detected at t = " << format_double(res.blowup_time) << "\n";
        return 2;
    }
    return 0;
}

int cmd_check_identities(int dim, int size, std::uint64_t seed) {
    TorusGrid g(dim, size);
    std::vector<std::pair<std::string, double>> rows;

    MKGState lorenz = lorenz_compatible_state(g, seed);
    auto dec = decompose_interaction(lorenz);
    rows.emplace_back("decompose_interaction (P1+P2 = A^mu d_mu phi)",
                      distance(dec.p1 + dec.p2, dec.direct) / std::max(1e-30, l2_norm(dec.direct)));

    MKGState rand = random_state(g, seed + 1);
    auto N = rhs_N(rand);
    auto j = current(rand);
    double njgap = 0;
    for (int mu = 0; mu <= g.n; ++mu) njgap = std::max(njgap, l2_norm(N[std::size_t(mu)] + j[std::size_t(mu)]));
    rows.emplace_back("current_vs_N (N = -j)", njgap);

    rows.emplace_back("M_vs_Mtilde (Lorenz gauge)",
                      l2_norm(rhs_M(lorenz) - rhs_Mtilde(lorenz)) / std::max(1e-30, l2_norm(rhs_M(lorenz))));

    auto rng = rng_stream(seed, 0xabcdull);
    std::vector<SpectralScalar> a;
    for (int k = 1; k <= g.n; ++k) a.push_back(random_real_field(g, rng));
    auto parts = helmholtz_split(a);
    double recomb = 0, divfree = 0;
    SpectralScalar div(g);
    for (int k = 1; k <= g.n; ++k) {
        SpectralScalar want = a[std::size_t(k - 1)];
        want.coeffs[0] = 0;
        recomb = std::max(recomb, distance(parts.df[std::size_t(k - 1)] + parts.cf[std::size_t(k - 1)], want));
        div = div + deriv(parts.df[std::size_t(k - 1)], k);
    }
    divfree = l2_norm(div);
    rows.emplace_back("helmholtz_recombination (df + cf = a - mean)", recomb);
    rows.emplace_back("helmholtz_divfree (div a^df = 0)", divfree);

    Faraday F = faraday_from_potential(rand);
    rows.emplace_back("faraday_bianchi (cyclic dF = 0)", bianchi_residual(F));

    FieldWithTimeDeriv u{lorenz.phi, lorenz.phi_t};
    rows.emplace_back("nullform_antisymmetry (Q(u,u) = 0)", l2_norm(null_form(0, 1, u, u)));

    InitialData d = build_data(rand.phi, rand.phi_t, seed + 2);
    double worst_constraint = 0;
    for (auto& [k, v] : d.residuals) worst_constraint = std::max(worst_constraint, v);
    rows.emplace_back("initdata_constraints (Eqs. 10-15)", worst_constraint);

    const double tol = 1e-9;
    bool ok = true;
    std::printf("identity check on n=%d, N=%d, seed %llu\n", dim, size, (unsigned long long)seed);
    std::printf("%-55s %-14s %s\n", "identity", "residual", "status");
    for (auto& [name, val] : rows) {
        bool pass = val <= tol;
        ok = ok && pass;
        std::printf("%-55s %-14.3e %s\n", name.c_str(), val, pass ? "ok" : "FAIL");
    }
    if (!ok) {
        for (auto& [name, val] : rows)
            if (val > tol) std::printf("FAILED: %s (residual %.3e > 1e-9)\n", name.c_str(), val);
        return 3;
    }
    std::printf("all identities within 1e-9\n");
    return 0;
}

EstimateKind parse_estimate(const std::string& name) {
    if (name == "prop36") return EstimateKind::Prop36;
    if (name == "strichartz") return EstimateKind::Strichartz;
    if (name == "lv") return EstimateKind::LeeVargas;
    if (name == "nullgain") return EstimateKind::NullGain;
    throw std::invalid_argument("estimate: unknown estimate '" + name + "'");
}

std::vector<std::pair<int, int>> parse_resolutions(const std::string& spec) {
    std::vector<std::pair<int, int>> out;
    std::string token;
    std::istringstream ss(spec);
    while (std::getline(ss, token, ',')) {
        auto x = token.find('x');
        if (x == std::string::npos) {
            int N = std::stoi(token);
            out.emplace_back(N, N);
        } else {
            out.emplace_back(std::stoi(token.substr(0, x)), std::stoi(token.substr(x + 1)));
        }
    }
    if (out.empty()) throw std::invalid_argument("resolutions: empty list");
    return out;
}

json report_json(const ProbeReport& rep) {
    json out;
    const ProbeConfig& c = rep.config;
    const char* est = c.estimate == EstimateKind::Prop36       ? "prop36"
                      : c.estimate == EstimateKind::Strichartz ? "strichartz"
                      : c.estimate == EstimateKind::LeeVargas  ? "lv"
                                                               : "nullgain";
    const char* ens = c.ensemble == EnsembleSpec::Kind::RandomFree ? "random"
                      : c.ensemble == EnsembleSpec::Kind::Knapp    ? "knapp"
                                                                   : "single";
    out["config"] = {{"estimate", est},       {"ensemble", ens},       {"dimension", c.dimension},
                     {"trials", c.trials},    {"seed", c.seed},        {"s0", c.s0},
                     {"s1", c.s1},            {"s2", c.s2},            {"q", c.q},
                     {"r", c.rr},             {"alpha1", c.alpha1},    {"alpha2", c.alpha2},
                     {"beta0", c.beta0},      {"eps", c.eps},          {"b_epsilon", c.b_epsilon}};
    json res = json::array();
    for (auto [N, Nt] : c.resolutions) res.push_back({{"N", N}, {"Nt", Nt}});
    out["config"]["resolutions"] = res;
    out["admissible"] = rep.admissible;
    out["violated_conditions"] = rep.violated_conditions;
    out["slope"] = rep.slope;
    out["verdict"] = rep.verdict;
    out["resolutions"] = json::array();
    for (const auto& st : rep.per_resolution) {
        json r{{"N", st.N},       {"Nt", st.Nt},          {"max", st.max_ratio},
               {"median", st.median_ratio}, {"mean", st.mean_ratio}, {"skipped", st.skipped}};
        r["ratios"] = st.ratios;
        out["resolutions"].push_back(r);
    }
    return out;
}

int cmd_probe(ProbeConfig& config, const std::string& outdir) {
    ProbeReport rep = probe(config);

    fs::create_directories(outdir);
    {
        std::ofstream os(fs::path(outdir) / "probe_report.json");
        os << report_json(rep).dump(2) << "\n";
    }
    {
        std::ofstream os(fs::path(outdir) / "probe_summary.csv");
        os << "N,Nt,max_ratio,median_ratio,mean_ratio,skipped\n";
        for (const auto& st : rep.per_resolution)
            os << st.N << "," << st.Nt << "," << format_double(st.max_ratio) << ","
               << format_double(st.median_ratio) << "," << format_double(st.mean_ratio) << ","
               << st.skipped << "\n";
    }

    std::cout << "estimate " << (rep.admissible ? "admissible" : "NOT admissible");
    for (const auto& v : rep.violated_conditions) std::cout << " [violated: " << v << "]";
    std::cout << "\nslope " << format_double(rep.slope) << ", verdict " << rep.verdict << "\n";
    for (const auto& st : rep.per_resolution)
        std::cout << "  N=" << st.N << " Nt=" << st.Nt << " max " << format_double(st.max_ratio)
                  << " median " << format_double(st.median_ratio) << " skipped " << st.skipped << "\n";

    if (rep.verdict == "growing") {
        if (rep.admissible) {
            std::cout << "ratio GROWS although exponents are admissible: implementation red flag\n";
            return 4;
        }
        std::cout << "notice: ratio grows, as expected for deliberately violated exponents\n";
    }
    return 0;
}

int cmd_info(int dim, int N, const SobolevExponents& exps) {
    TorusGrid g(dim, N);
    std::printf("torus grid: n = %d, N = %d, h = %.6f, lattice points = %zu\n", g.n, g.N, g.spacing(),
                g.size());
    std::printf("dealias fraction rho = %.4f, kept band |xi_i| <= %d\n", g.dealias_fraction, g.kept_limit());
    auto violated = exps.violated(dim);
    std::printf("exponents: s = %g, r = %g, epsilon = %g\n", exps.s, exps.r, exps.epsilon);
    if (violated.empty()) {
        std::printf("Theorem-1 hypothesis set: admissible\n");
    } else {
        std::printf("Theorem-1 hypothesis set: NOT admissible\n");
        for (const auto& v : violated) std::printf("  violated: %s\n", v.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mkg: Maxwell-Klein-Gordon simulator (Lorenz gauge, flat torus)"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "build data, evolve, write diagnostics");
    std::string config_path;
    run->add_option("config", config_path, "JSON config file");
    std::optional<int> o_dim, o_N, o_cadence;
    std::optional<double> o_dt, o_T, o_mass, o_s, o_r, o_eps, o_amp;
    std::optional<std::string> o_scheme, o_preset, o_out, o_snapshot;
    std::optional<std::uint64_t> o_seed;
    bool strict = false;
    run->add_option("--dim", o_dim, "spatial dimension");
    run->add_option("--N", o_N, "grid points per axis");
    run->add_option("--dt", o_dt, "time step");
    run->add_option("--T", o_T, "final time");
    run->add_option("--scheme", o_scheme, "rk4 | gautschi");
    run->add_option("--mass", o_mass, "scalar mass m");
    run->add_option("--preset", o_preset, "data preset name (zero, smalldata-n2, smooth-random)");
    run->add_option("--snapshot", o_snapshot, "initial data from MKGS snapshot");
    run->add_option("--seed", o_seed, "data seed");
    run->add_option("--amplitude", o_amp, "random-data amplitude");
    run->add_option("--s", o_s, "phi regularity exponent s");
    run->add_option("--r", o_r, "potential regularity exponent r");
    run->add_option("--epsilon", o_eps, "the paper's epsilon");
    run->add_option("--cadence", o_cadence, "diagnostic cadence in steps");
    std::optional<int> o_snap_cadence;
    run->add_option("--snapshot-cadence", o_snap_cadence, "write MKGS snapshots every this many records (0: final only)");
    run->add_option("--out", o_out, "output directory");
    run->add_flag("--strict-exponents", strict, "reject inadmissible Theorem-1 exponents");

    // check-identities
    auto* check = app.add_subcommand("check-identities", "run the full identity suite on random data");
    int ci_dim = 2, ci_size = 32;
    std::uint64_t ci_seed = 7;
    check->add_option("--dim", ci_dim, "spatial dimension");
    check->add_option("--size", ci_size, "grid points per axis");
    check->add_option("--seed", ci_seed, "random seed");

    // probe
    auto* probe_cmd = app.add_subcommand("probe", "empirical bilinear-estimate probes");
    std::string est_name = "prop36", ens_name = "random", res_spec, probe_out = "mkg_probe";
    ProbeConfig pc;
    probe_cmd->add_option("--estimate", est_name, "prop36 | strichartz | lv | nullgain");
    probe_cmd->add_option("--ensemble", ens_name, "random | knapp | single");
    probe_cmd->add_option("--dim", pc.dimension, "spatial dimension");
    probe_cmd->add_option("--trials", pc.trials, "trials per resolution");
    probe_cmd->add_option("--resolutions", res_spec, "comma list: N or NxNt (e.g. 8x8,16x16,32x32)");
    probe_cmd->add_option("--seed", pc.seed, "ensemble seed");
    probe_cmd->add_option("--s0", pc.s0, "prop36 s0");
    probe_cmd->add_option("--s1", pc.s1, "prop36 s1");
    probe_cmd->add_option("--s2", pc.s2, "prop36 s2");
    probe_cmd->add_option("--q", pc.q, "strichartz/lv q");
    probe_cmd->add_option("--lr", pc.rr, "strichartz r");
    probe_cmd->add_option("--alpha1", pc.alpha1, "lv alpha1");
    probe_cmd->add_option("--alpha2", pc.alpha2, "lv alpha2");
    probe_cmd->add_option("--beta0", pc.beta0, "lv beta0");
    probe_cmd->add_option("--eps", pc.eps, "nullgain epsilon");
    probe_cmd->add_option("--b-eps", pc.b_epsilon, "right-hand b = 1/2 + eps");
    probe_cmd->add_option("--out", probe_out, "output directory");

    // info
    auto* info = app.add_subcommand("info", "grid and exponent admissibility report");
    int in_dim = 2, in_N = 64;
    SobolevExponents in_exps{1.2, 1.0, 0.05};
    info->add_option("--dim", in_dim, "spatial dimension");
    info->add_option("--N", in_N, "grid points per axis");
    info->add_option("--s", in_exps.s, "s exponent");
    info->add_option("--r", in_exps.r, "r exponent");
    info->add_option("--epsilon", in_exps.epsilon, "epsilon");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            RunConfig c = parse_config(config_path);
            if (o_dim) c.dimension = *o_dim;
            if (o_N) c.N = *o_N;
            if (o_dt) c.dt = *o_dt;
            if (o_T) c.T = *o_T;
            if (o_scheme) c.scheme = *o_scheme;
            if (o_mass) c.mass = *o_mass;
            if (o_preset) {
                c.data_type = "preset";
                c.data_name = *o_preset;
            }
            if (o_snapshot) {
                c.data_type = "snapshot";
                c.data_path = *o_snapshot;
            }
            if (o_seed) c.seed = *o_seed;
            if (o_amp) c.amplitude = *o_amp;
            if (o_s) c.exps.s = *o_s;
            if (o_r) c.exps.r = *o_r;
            if (o_eps) c.exps.epsilon = *o_eps;
            if (o_cadence) c.cadence = *o_cadence;
            if (o_snap_cadence) c.snapshot_cadence = *o_snap_cadence;
            if (o_out) c.output_dir = *o_out;
            c.strict_exponents = strict;
            return cmd_run(c);
        }
        if (check->parsed()) return cmd_check_identities(ci_dim, ci_size, ci_seed);
        if (probe_cmd->parsed()) {
            pc.estimate = parse_estimate(est_name);
            if (ens_name == "random")
                pc.ensemble = EnsembleSpec::Kind::RandomFree;
            else if (ens_name == "knapp")
                pc.ensemble = EnsembleSpec::Kind::Knapp;
            else if (ens_name == "single")
                pc.ensemble = EnsembleSpec::Kind::SingleMode;
            else
                throw std::invalid_argument("ensemble: unknown ensemble '" + ens_name + "'");
            if (!res_spec.empty()) pc.resolutions = parse_resolutions(res_spec);
            auto bad = probe_admissibility(pc);
            for (const auto& b : bad)
                if (b.find("unknown") != std::string::npos) throw std::invalid_argument(b);
            return cmd_probe(pc, probe_out);
        }
        if (info->parsed()) return cmd_info(in_dim, in_N, in_exps);
    } catch (const BlowupError& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
