// eszm: verification sweeps, locality profiles, Delta scans and autocorrelators.
// Exit codes: 0 ok, 1 configuration error, 2 identity violated, 3 no threshold crossing.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "eszm/io.hpp"
#include "eszm/models_ed.hpp"
#include "eszm/mpo_locality.hpp"

using namespace eszm;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string series = "a1";
    int n = 2;
    std::optional<double> delta;
    std::optional<std::string> q;
    int length = 30;
    unsigned long seed = 0;
    int trials = 20;
    double tol = 1e-10;
    double mutate = 0.0;
    std::optional<BoundaryParams> boundary;
    std::string boundaryFile;
    int fitStart = 3;
    int fitEnd = 0;  // 0 means L - 4
    std::string method = "direct";
    double from = -2.0, to = -1.0, step = 0.01, scanTol = 1e-6;
    FieldsDocument fields;
    std::string fieldsFile;
    double tmax = 200.0, dt = 0.25;
    std::string outPath;
    std::string manifestPath;
};

CouplingParams coupling(const RunConfig& c) {
    if (c.q && c.delta) throw ConfigError("give either --delta or --q, not both");
    if (c.q) return CouplingParams::from_q(parse_complex(*c.q));
    if (c.delta) return CouplingParams::from_delta(*c.delta);
    throw ConfigError("one of --delta or --q is required");
}

json params_json(const RunConfig& c) {
    json p;
    p["series"] = c.series;
    p["n"] = c.n;
    if (c.delta) p["delta"] = *c.delta;
    if (c.q) p["q"] = *c.q;
    p["length"] = c.length;
    p["seed"] = c.seed;
    p["trials"] = c.trials;
    p["tol"] = c.tol;
    p["mutate"] = c.mutate;
    if (c.boundary) p["boundary"] = boundary_to_json(c.series, c.n, *c.boundary);
    p["fit_start"] = c.fitStart;
    p["fit_end"] = c.fitEnd;
    p["method"] = c.method;
    p["from"] = c.from;
    p["to"] = c.to;
    p["step"] = c.step;
    p["scan_tol"] = c.scanTol;
    p["h_left"] = c.fields.left;
    p["h_right"] = c.fields.right;
    p["tmax"] = c.tmax;
    p["dt"] = c.dt;
    return p;
}

RunConfig config_from_manifest(const json& m) {
    RunConfig c;
    c.command = m.at("command").get<std::string>();
    const json& p = m.at("params");
    c.series = p.at("series");
    c.n = p.at("n");
    if (p.contains("delta")) c.delta = p["delta"].get<double>();
    if (p.contains("q")) c.q = p["q"].get<std::string>();
    c.length = p.at("length");
    c.seed = p.at("seed");
    c.trials = p.at("trials");
    c.tol = p.at("tol");
    c.mutate = p.at("mutate");
    if (p.contains("boundary")) c.boundary = parse_boundary_json(p["boundary"]).params;
    c.fitStart = p.at("fit_start");
    c.fitEnd = p.at("fit_end");
    c.method = p.at("method");
    c.from = p.at("from");
    c.to = p.at("to");
    c.step = p.at("step");
    c.scanTol = p.at("scan_tol");
    c.fields = parse_fields_json(p);
    c.tmax = p.at("tmax");
    c.dt = p.at("dt");
    return c;
}

// ---- verify ----

int cmd_verify(const RunConfig& c, std::ostream& out, json& summary) {
    const Series s = parse_series(c.series);
    SeriesSpec spec = make_series_spec(s, c.n, coupling(c));
    RMatrixFn fn(spec);
    fn.set_mutation(c.mutate);
    std::mt19937_64 gen(c.seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); };
    auto rand_u = [&] { return cplx(uni(-2.0, 2.0), uni(-kPi, kPi)); };

    std::vector<std::pair<std::string, double>> worst = {
        {"ybe", 0.0},      {"unitarity", 0.0}, {"crossing", 0.0},     {"periodicity", 0.0}, {"regularity", 0.0},
        {"sre", 0.0},      {"sre_shifted", 0.0}, {"k_regularity", 0.0}, {"half_period", 0.0},
        {"pull_through", 0.0}};
    auto bump = [&](const char* key, double v) {
        for (auto& [k, w] : worst)
            if (k == key) w = std::max(w, v);
    };
    bump("regularity", check_regularity(fn));
    for (int t = 0; t < c.trials; ++t) {
        BoundaryParams bp;
        if (c.boundary) {
            bp = *c.boundary;
        } else {
            for (const auto& k : template_keys(s, c.n)) {
                cplx b(uni(-1.0, 1.0), uni(-1.0, 1.0));
                if (k == "i,i'") b += 1.5;
                bp.betaMinus[k] = b;
                bp.betaPlus[k] = b;
            }
        }
        BoundaryPair pair(spec, bp);
        cplx u = rand_u(), v = rand_u();
        bump("ybe", check_ybe(fn, u, v));
        bump("unitarity", check_unitarity(fn, v));
        bump("crossing", check_crossing(fn, u));
        bump("periodicity", check_periodicity(fn, u));
        bump("sre", check_sre(fn, pair, u, v));
        bump("sre_shifted", check_sre(fn, pair, u, v, true));
        bump("k_regularity", check_k_regularity(pair));
        bump("half_period", check_half_period(pair));
        bump("pull_through", check_pull_through(fn, pair, v));
    }
    bool ok = true;
    out << "identity,max_residual,status\n";
    for (const auto& [k, w] : worst) {
        bool pass = w <= c.tol;
        ok = ok && pass;
        out << k << ',' << fmt17(w) << ',' << (pass ? "PASS" : "FAIL") << '\n';
        summary["residuals"][k] = w;
    }
    std::cerr << (ok ? "all identities hold" : "identity violated") << " (tol " << c.tol << ")\n";
    return ok ? 0 : 2;
}

// ---- localize ----

int cmd_localize(const RunConfig& c, std::ostream& out, json& summary) {
    if (!c.boundary) throw ConfigError("localize needs --boundary");
    ChainConfig cfg = make_chain(parse_series(c.series), c.n, coupling(c), *c.boundary, c.length);
    ProfileOptions opt;
    opt.fitStart = c.fitStart;
    opt.fitEnd = c.fitEnd == 0 ? -4 : c.fitEnd;
    if (c.method == "spectral") opt.method = NormsMethod::Spectral;
    else if (c.method != "direct") throw ConfigError("--method must be direct or spectral");
    const int jEnd = opt.fitEnd <= 0 ? c.length + opt.fitEnd : opt.fitEnd;
    if (jEnd - opt.fitStart + 1 < 4) throw ConfigError("fit window holds fewer than 4 sites");

    double orth = std::abs(orthogonality(cfg.boundaries));
    if (relative_trace_k_plus(cfg.boundaries) > 1e-10)
        std::cerr << "warning: Tr K+(p/2) != 0, the orthogonality condition fails (|<K|Phi>| = " << orth << ")\n";
    LocalityProfile prof = norms_profile(cfg, opt);
    if (prof.clipped > 0) std::cerr << "warning: " << prof.clipped << " negative norms clipped\n";

    out << "j,norm_sq,log_norm_sq\n";
    for (int j = 1; j <= c.length; ++j) {
        double v = prof.normsSquared[j - 1];
        out << j << ',' << fmt17(v) << ',' << (v > 0.0 ? fmt17(std::log(v)) : std::string("-inf")) << '\n';
    }
    out << "# alpha," << fmt17(prof.fit.alpha) << '\n';
    out << "# r_squared," << fmt17(prof.fit.rSquared) << '\n';
    out << "# normalization," << fmt17(prof.normalization) << '\n';
    const char* verdict = prof.fit.localized ? "LOCALIZED" : "DELOCALIZED";
    std::cerr << "alpha = " << prof.fit.alpha << "  R^2 = " << prof.fit.rSquared << "  fit window [" << prof.fit.jStart
              << ", " << prof.fit.jEnd << "]\n"
              << verdict << '\n';
    summary["alpha"] = prof.fit.alpha;
    summary["r_squared"] = prof.fit.rSquared;
    summary["verdict"] = verdict;
    summary["orthogonality_abs"] = orth;
    return 0;
}

// ---- scan-delta ----

int cmd_scan(const RunConfig& c, std::ostream& out, json& summary) {
    if (!(c.to > c.from) || !(c.step > 0.0)) throw ConfigError("empty Delta range");
    if (c.from < -1.0 && c.to > -1.0) throw ConfigError("range must not cross Delta = -1");
    ScanResult r = scan_delta_threshold(parse_series(c.series), c.n, c.from, c.to, c.step, c.scanTol);
    out << "delta,overlap,top_modulus,deflated_radius\n";
    for (const auto& row : r.rows)
        out << fmt17(row.delta) << ',' << fmt17(row.overlap) << ',' << fmt17(row.topModulus) << ','
            << fmt17(row.deflatedRadius) << '\n';
    if (!r.threshold) {
        std::cerr << "no threshold crossing in [" << c.from << ", " << c.to << "]\n";
        return 3;
    }
    out << "# threshold," << fmt17(*r.threshold) << '\n';
    std::cerr << "threshold = " << *r.threshold << '\n';
    summary["threshold"] = *r.threshold;
    return 0;
}

// ---- autocorr ----

int cmd_autocorr(const RunConfig& c, std::ostream& out, json& summary) {
    if (!c.delta) throw ConfigError("autocorr needs --delta");
    if (!(*c.delta > 1.0)) throw ConfigError("autocorr needs Delta > 1 (IK couplings are complex otherwise)");
    if (c.length < 2 || c.length > 7) throw ConfigError("autocorr needs 2 <= L <= 7");
    if (!(c.dt > 0.0) || !(c.tmax > 0.0)) throw ConfigError("time grid must be positive");
    CMatrix H = ik_hamiltonian(c.length, *c.delta, c.fields.left, c.fields.right);
    CMatrix O = site_operator(boundary_observable_ik(), 0, c.length);
    HermitianSpectrum spec = diagonalize(H);
    EdRun run = autocorrelation(spec, O, time_grid(c.tmax, c.dt));
    double dep = dephased_average(spec, O);
    out << "t,C\n";
    for (size_t k = 0; k < run.times.size(); ++k) out << fmt17(run.times[k]) << ',' << fmt17(run.correlator[k]) << '\n';
    out << "# plateau," << fmt17(run.plateau) << '\n';
    out << "# dephased_average," << fmt17(dep) << '\n';
    std::cerr << "plateau = " << run.plateau << "  dephased average = " << dep << "  C(0) = " << run.correlator[0]
              << '\n';
    summary["plateau"] = run.plateau;
    summary["dephased_average"] = dep;
    summary["max_imag"] = run.maxImag;
    return 0;
}

int dispatch(RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!c.outPath.empty()) {
        file.open(c.outPath);
        if (!file) throw ConfigError("cannot write " + c.outPath);
        out = &file;
    }
    json summary = json::object();
    int code = 0;
    if (c.command == "verify") code = cmd_verify(c, *out, summary);
    else if (c.command == "localize") code = cmd_localize(c, *out, summary);
    else if (c.command == "scan-delta") code = cmd_scan(c, *out, summary);
    else if (c.command == "autocorr") code = cmd_autocorr(c, *out, summary);
    else throw ConfigError("unknown command " + c.command);
    out->flush();

    json m;
    m["version"] = kVersion;
    m["command"] = c.command;
    m["params"] = params_json(c);
    m["inputs"] = {{"boundary_file", c.boundaryFile}, {"fields_file", c.fieldsFile}};
    m["output"] = c.outPath;
    m["summary"] = summary;
    m["exit_code"] = code;
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string mpath = c.manifestPath;
    if (mpath.empty() && !c.outPath.empty()) mpath = c.outPath + ".manifest.json";
    if (!mpath.empty()) {
        std::ofstream mf(mpath);
        mf << m.dump(2) << '\n';
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact strong zero modes of open integrable chains"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    RunConfig c;
    std::string deltaText, manifestIn;

    auto common = [&](CLI::App* sub, bool needsSeries) {
        auto* so = sub->add_option("--series", c.series, "a1, a2odd, a2even, b1, c1, d1");
        if (needsSeries) so->required();
        sub->add_option("--n", c.n, "rank");
        sub->add_option("--delta", deltaText, "anisotropy (real)");
        sub->add_option("--q", c.q, "deformation parameter as re,im");
        sub->add_option("--out", c.outPath, "CSV output (default stdout)");
        sub->add_option("--manifest", c.manifestPath, "manifest path (default <out>.manifest.json)");
    };

    auto* verify = app.add_subcommand("verify", "check YBE, SRE and companion identities on random samples");
    common(verify, true);
    verify->add_option("--trials", c.trials)->check(CLI::PositiveNumber);
    verify->add_option("--seed", c.seed);
    verify->add_option("--tol", c.tol);
    verify->add_option("--boundary", c.boundaryFile, "boundary JSON (default: random betas per trial)");
    verify->add_option("--mutate", c.mutate, "scale one R weight by (1 + eps), test fixture");

    auto* localize = app.add_subcommand("localize", "HS norm profile of the zero mode and decay fit");
    common(localize, false);
    localize->add_option("--length", c.length)->check(CLI::Range(2, 100000));
    localize->add_option("--boundary", c.boundaryFile)->required();
    localize->add_option("--fit-start", c.fitStart);
    localize->add_option("--fit-end", c.fitEnd, "last fitted site, <= 0 counts from L (default L - 4)");
    localize->add_option("--method", c.method, "direct or spectral");

    auto* scan = app.add_subcommand("scan-delta", "locate where the Bell state leaves the top of the spectrum");
    common(scan, true);
    scan->add_option("--from", c.from);
    scan->add_option("--to", c.to);
    scan->add_option("--step", c.step);
    scan->add_option("--tol", c.scanTol);

    auto* autocorr = app.add_subcommand("autocorr", "infinite-temperature autocorrelator of the IK edge spin");
    common(autocorr, false);
    autocorr->add_option("--length", c.length);
    autocorr->add_option("--fields", c.fieldsFile, "JSON with h_left / h_right");
    autocorr->add_option("--tmax", c.tmax);
    autocorr->add_option("--dt", c.dt);

    auto* replay = app.add_subcommand("replay", "rerun from a manifest");
    replay->add_option("file", manifestIn, "manifest JSON")->required();
    replay->add_option("--out", c.outPath);
    replay->add_option("--manifest", c.manifestPath);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (replay->parsed()) {
            std::ifstream in(manifestIn);
            if (!in) throw ConfigError("cannot open manifest " + manifestIn);
            RunConfig r = config_from_manifest(json::parse(in));
            r.outPath = c.outPath;
            r.manifestPath = c.manifestPath;
            return dispatch(r);
        }
        c.command = app.get_subcommands().front()->get_name();
        if (!deltaText.empty()) c.delta = std::stod(deltaText);
        if (!c.boundaryFile.empty()) {
            BoundaryDocument doc = load_boundary_file(c.boundaryFile);
            if (localize->parsed() && localize->count("--series") == 0) {
                c.series = doc.series;
                if (localize->count("--n") == 0) c.n = doc.n;
            }
            if (doc.series != c.series || doc.n != c.n)
                throw ConfigError("boundary file is for " + doc.series + " n=" + std::to_string(doc.n));
            c.boundary = doc.params;
        }
        if (!c.fieldsFile.empty()) c.fields = load_fields_file(c.fieldsFile);
        parse_series(c.series);
        return dispatch(c);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const PoleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: bad JSON: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
