#include "bcinv/cli.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcinv/connecting.hpp"
#include "bcinv/csv_io.hpp"
#include "bcinv/errors.hpp"
#include "bcinv/forward.hpp"
#include "bcinv/inverse_bc.hpp"
#include "bcinv/inverse_gl.hpp"
#include "bcinv/spectral.hpp"

namespace bcinv::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Bad user input caught before any solver runs.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("cli", what) {}
    const char* kind() const noexcept override { return "bad_config"; }
};

const std::vector<std::string> kCommands{"forward", "invert", "spectral", "roundtrip", "compare"};
const std::vector<std::string> kMethods{"bc", "remling", "gl", "gl-classical", "simon"};

bool member(const std::vector<std::string>& set, const std::string& s) {
    return std::find(set.begin(), set.end(), s) != set.end();
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["potential"] = c.potential;
    j["response"] = c.response;
    j["L"] = c.L;
    j["T"] = c.T ? json(*c.T) : json(nullptr);
    j["n"] = c.n;
    j["tol"] = c.tol;
    j["method"] = c.method;
    j["n_max"] = c.n_max;
    j["k_min"] = c.k_min;
    j["k_max"] = c.k_max;
    j["k_count"] = c.k_count;
    j["strict_positivity"] = c.strict_positivity;
    return j;
}

// ---- potentials ----------------------------------------------------------

PotentialSample make_potential(const RunConfig& c) {
    const std::string& name = c.potential;
    auto sampled = [&](auto fn) {
        const UniformGrid grid(c.n, c.L);
        std::vector<double> v(c.n);
        for (std::size_t i = 0; i < c.n; ++i) v[i] = fn(i + 1 == c.n ? c.L : grid.at(i));
        return PotentialSample(grid, std::move(v));
    };
    if (name == "zero") return sampled([](double) { return 0.0; });
    if (name == "sine") return sampled([](double x) { return std::sin(std::numbers::pi * x) + 0.5; });
    if (name == "step") return sampled([&](double x) { return x <= c.L / 2.0 ? 1.0 : 0.0; });
    if (name.rfind("const:", 0) == 0) {
        const std::string num = name.substr(6);
        char* end = nullptr;
        const double value = std::strtod(num.c_str(), &end);
        if (num.empty() || end != num.c_str() + num.size() || !std::isfinite(value)) {
            throw ConfigError("bad constant in potential '" + name + "'");
        }
        return sampled([value](double) { return value; });
    }
    if (!fs::exists(name)) throw ConfigError("potential '" + name + "' is neither a builtin nor a file");
    return read_potential_csv(name);
}

void validate(const RunConfig& c) {
    if (!member(kCommands, c.command)) throw ConfigError("unknown command '" + c.command + "'");
    if (!member(kMethods, c.method)) throw ConfigError("unknown method '" + c.method + "'");
    if (!(c.L > 0.0)) throw ConfigError("L must be positive");
    if (c.T && !(*c.T > 0.0)) throw ConfigError("T must be positive");
    if (c.n < 3) throw ConfigError("n must be at least 3");
    if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
    if (c.n_max < 1) throw ConfigError("n-max must be at least 1");
    if (!(c.k_min > 0.0) || !(c.k_max >= c.k_min) || c.k_count < 1) throw ConfigError("bad k range");
    if ((c.command == "invert" || c.command == "compare") && c.response.empty()) {
        throw ConfigError(c.command + " needs --response");
    }
}

// ---- output helpers ------------------------------------------------------

std::vector<std::string> header(const RunConfig& c, const std::string& what) {
    return {"config_hash=" + config_hash(c), what};
}

void write_json(const fs::path& path, json j, const RunConfig& c) {
    j["config_hash"] = config_hash(c);
    std::ofstream out(path);
    if (!out) throw Error("cli", "cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json array_of(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number_or_null(x));
    return a;
}

json positivity_json(const PositivityReport& p) {
    return {{"min_eig", p.min_eig}, {"positive", p.positive}, {"n", p.n}};
}

void write_q_hat(const fs::path& path, const RecoveryResult& rec, const RunConfig& c) {
    std::ofstream out(path);
    if (!out) throw Error("cli", "cannot write '" + path.string() + "'");
    for (const auto& line : header(c, "method=" + rec.method + " gaps=" + std::to_string(rec.gaps.size()))) {
        out << "# " << line << '\n';
    }
    out << "x,q\n";
    for (std::size_t i = 0; i < rec.q_hat.size(); ++i) {
        if (!std::isfinite(rec.q_hat[i])) continue;
        const double x = i + 1 == rec.q_hat.size() ? rec.grid.length() : rec.grid.at(i);
        out << format_double(x) << ',' << format_double(rec.q_hat[i]) << '\n';
    }
}

json diagnostics_json(const RecoveryResult& rec) {
    json j;
    j["method"] = rec.method;
    j["positivity"] = rec.positivity ? positivity_json(*rec.positivity) : json(nullptr);
    j["max_residual"] = rec.max_residual;
    json gaps = json::array();
    for (auto i : rec.gaps) gaps.push_back(rec.grid.at(i));
    j["gaps"] = gaps;
    std::map<std::string, std::size_t> branches;
    for (const auto& b : rec.branch) ++branches[b];
    j["branches"] = branches;
    j["zero_guard"] = kZeroGuard;
    j["trace0"] = array_of(rec.trace0);
    j["trace1"] = array_of(rec.trace1);
    j["notes"] = rec.notes;
    return j;
}

// ---- pipelines -----------------------------------------------------------

RecoveryResult recover(const std::string& method, const ResponseSample& r, double T) {
    const double h = r.grid.step();
    if (method == "bc") return recover_q_bc(r, T, h);
    if (method == "remling") return recover_q_remling(r, T);
    const auto c = build_connecting_kernel(r, T);
    if (method == "gl") return gl_local_solve(c).recovery;
    if (method == "gl-classical") return gl_classical_solve(F_from_connecting(c), c.grid());
    const auto A = amplitude_from_response(r);
    return simon_flow(A, T, A.grid.step());
}

struct Inversion {
    RecoveryResult rec;
    PositivityReport positivity;
};

/// Returns nullopt after writing diagnostics when strict positivity fails.
std::optional<Inversion> invert_checked(const RunConfig& c, const ResponseSample& r, double T,
                                        const std::string& method, std::ostream& log) {
    const auto pos = positivity_margin(build_connecting_kernel(r, T));
    if (!pos.positive) {
        log << "warning: connecting operator not positive definite (min eigenvalue " << pos.min_eig << ")\n";
        if (c.strict_positivity) {
            json d{{"method", method}, {"positivity", positivity_json(pos)}, {"aborted", "strict positivity"}};
            write_json(fs::path(c.out) / "diagnostics.json", d, c);
            return std::nullopt;
        }
    }
    auto rec = recover(method, r, T);
    rec.positivity = pos;
    return Inversion{std::move(rec), pos};
}

double horizon_for(const RunConfig& c, double available) {
    const double T = c.T.value_or(available);
    if (T > available * (1.0 + 1e-12)) throw ConfigError("T exceeds the available data interval");
    return T;
}

ResponseSample forward_response(const RunConfig& c, const PotentialSample& q, double& T) {
    T = horizon_for(c, q.grid.length());
    return response_function(q, T, c.tol);
}

int cmd_forward(const RunConfig& c, std::ostream& log) {
    const auto q = make_potential(c);
    const double T = horizon_for(c, q.grid.length());
    const auto v = solve_goursat_picard(q, T, c.tol);
    const auto r = response_from_kernel(v, q);
    write_series_csv((fs::path(c.out) / "r.csv").string(), r.grid, r.values, "t", "value",
                     header(c, "response function on [0, 2T], T=" + format_double(T)));
    const auto w = v.to_wave_kernel();
    std::vector<double> coords(w.size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = w.grid().at(i);
    auto comments = header(c, "w(x,t): rows t, columns x");
    comments.push_back("domain=lower-triangle");
    write_matrix_csv((fs::path(c.out) / "w-kernel.csv").string(), coords, coords, w.lower(), comments);
    log << "forward: wrote r.csv (" << r.size() << " samples) and w-kernel.csv\n";
    return kOk;
}

int cmd_invert(const RunConfig& c, std::ostream& log) {
    const auto r = read_response_csv(c.response);
    const double T = horizon_for(c, r.horizon());
    const auto inv = invert_checked(c, r, T, c.method, log);
    if (!inv) return kPositivityViolation;
    write_q_hat(fs::path(c.out) / "q_hat.csv", inv->rec, c);
    write_json(fs::path(c.out) / "diagnostics.json", diagnostics_json(inv->rec), c);
    log << "invert: " << c.method << " recovered " << inv->rec.q_hat.size() - inv->rec.gaps.size() << " nodes\n";
    return kOk;
}

std::vector<double> k_grid(const RunConfig& c) {
    std::vector<double> k(static_cast<std::size_t>(c.k_count));
    for (int i = 0; i < c.k_count; ++i) {
        k[static_cast<std::size_t>(i)] =
            c.k_count == 1 ? c.k_min : c.k_min + (c.k_max - c.k_min) * i / (c.k_count - 1.0);
    }
    return k;
}

int cmd_spectral(const RunConfig& c, std::ostream& log) {
    const auto q = make_potential(c);
    const double L = q.grid.length();
    const double T = horizon_for(c, L);
    const auto sd = dirichlet_eigs(q, L, c.n_max);
    {
        std::ofstream out(fs::path(c.out) / "spectral.csv");
        for (const auto& line : header(c, "Dirichlet eigenpairs on [0, " + format_double(L) + "]")) {
            out << "# " << line << '\n';
        }
        out << "n,lambda,alpha,lambda0,alpha0\n";
        for (std::size_t i = 0; i < sd.count(); ++i) {
            out << i + 1 << ',' << format_double(sd.lambda[i]) << ',' << format_double(sd.alpha[i]) << ','
                << format_double(sd.lambda0[i]) << ',' << format_double(sd.alpha0[i]) << '\n';
        }
    }
    const auto mf = m_function(q, L, k_grid(c));
    {
        std::ofstream out(fs::path(c.out) / "m.csv");
        for (const auto& line : header(c, "m(-k^2), Dirichlet condition at x=L")) out << "# " << line << '\n';
        out << "k,m\n";
        for (std::size_t i = 0; i < mf.k.size(); ++i) out << format_double(mf.k[i]) << ',' << format_double(mf.m[i]) << '\n';
    }
    const auto grid = UniformGrid::with_step(T, q.grid.step());
    const auto ct = ct_from_sigma(sd, grid);
    std::vector<double> coords(grid.size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = grid.at(i);
    write_matrix_csv((fs::path(c.out) / "ct_spectral.csv").string(), coords, coords, ct.matrix(),
                     header(c, "c^T(t,s) from " + std::to_string(sd.count()) + " eigenpairs"));
    log << "spectral: " << sd.count() << " eigenpairs, " << mf.k.size() << " m values\n";
    return kOk;
}

json error_norms(const RecoveryResult& rec, const PotentialSample& q, double lo, double hi) {
    double e_inf = 0.0, q_inf = 0.0, e2 = 0.0, q2 = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < rec.q_hat.size(); ++i) {
        const double x = std::min(rec.grid.at(i), rec.grid.length());
        if (!std::isfinite(rec.q_hat[i]) || x < lo - 1e-12 || x > hi + 1e-12) continue;
        const double exact = q.at(x);
        const double e = rec.q_hat[i] - exact;
        e_inf = std::max(e_inf, std::abs(e));
        q_inf = std::max(q_inf, std::abs(exact));
        e2 += e * e;
        q2 += exact * exact;
        ++used;
    }
    // A zero potential has no scale; its errors are reported as absolute.
    return {{"interval", {lo, hi}},
            {"nodes", used},
            {"linf_rel", q_inf > 0.0 ? e_inf / q_inf : e_inf},
            {"l2_rel", q2 > 0.0 ? std::sqrt(e2 / q2) : std::sqrt(e2 / std::max<std::size_t>(used, 1))},
            {"normalization", q_inf > 0.0 ? "relative" : "absolute"}};
}

int cmd_roundtrip(const RunConfig& c, std::ostream& log) {
    const auto q = make_potential(c);
    double T = 0.0;
    const auto r = forward_response(c, q, T);
    write_series_csv((fs::path(c.out) / "r.csv").string(), r.grid, r.values, "t", "value",
                     header(c, "response function on [0, 2T], T=" + format_double(T)));
    const auto inv = invert_checked(c, r, T, c.method, log);
    if (!inv) return kPositivityViolation;
    write_q_hat(fs::path(c.out) / "q_hat.csv", inv->rec, c);
    write_json(fs::path(c.out) / "diagnostics.json", diagnostics_json(inv->rec), c);
    json report = error_norms(inv->rec, q, 0.0, T);
    report["method"] = c.method;
    report["T"] = T;
    report["h"] = q.grid.step();
    report["gaps"] = inv->rec.gaps.size();
    report["interior"] = error_norms(inv->rec, q, 0.1 * T, 0.9 * T);
    write_json(fs::path(c.out) / "error_report.json", report, c);
    log << "roundtrip: " << c.method << " linf_rel=" << report["linf_rel"].get<double>() << '\n';
    return kOk;
}

int cmd_compare(const RunConfig& c, std::ostream& log) {
    const auto r = read_response_csv(c.response);
    const double T = horizon_for(c, r.horizon());
    std::vector<RecoveryResult> results;
    for (const auto& m : kMethods) {
        auto inv = invert_checked(c, r, T, m, log);
        if (!inv) return kPositivityViolation;
        results.push_back(std::move(inv->rec));
    }
    const auto& base = results.front().grid;
    std::ofstream out(fs::path(c.out) / "compare.csv");
    for (const auto& line : header(c, "per-node recoveries; empty cells are gaps")) out << "# " << line << '\n';
    out << "x";
    for (const auto& m : kMethods) out << ',' << m;
    out << ",max_disagreement\n";
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double x = std::min(base.at(i), base.length());
        out << format_double(x);
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& rec : results) {
            // Simon's grid is twice as fine; every other node lines up.
            const std::size_t stride = (rec.grid.size() - 1) / (base.size() - 1);
            const double v = rec.q_hat[i * stride];
            out << ',';
            if (std::isfinite(v)) {
                out << format_double(v);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        out << ',' << (hi >= lo ? format_double(hi - lo) : "") << '\n';
    }
    log << "compare: wrote compare.csv for " << results.size() << " methods\n";
    return kOk;
}

json error_json(const Error& e) {
    json j{{"module", e.module()}, {"kind", e.kind()}, {"message", e.what()}};
    if (auto* ce = dynamic_cast<const ConvergenceError*>(&e)) j["achieved_bound"] = ce->achieved_bound();
    if (auto* ee = dynamic_cast<const EigenSolverError*>(&e)) j["index"] = ee->index();
    if (auto* pe = dynamic_cast<const PoleProximityError*>(&e)) j["k"] = pe->k();
    if (auto* fe = dynamic_cast<const FlowError*>(&e)) j["x_reached"] = fe->x_reached();
    return j;
}

}  // namespace

std::string canonical_json(const RunConfig& config) { return to_json(config).dump(); }

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical_json(config)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "command") c.command = value.get<std::string>();
            else if (key == "potential") c.potential = value.get<std::string>();
            else if (key == "response") c.response = value.get<std::string>();
            else if (key == "L") c.L = value.get<double>();
            else if (key == "T") c.T = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
            else if (key == "n") c.n = value.get<std::size_t>();
            else if (key == "tol") c.tol = value.get<double>();
            else if (key == "method") c.method = value.get<std::string>();
            else if (key == "n_max") c.n_max = value.get<int>();
            else if (key == "k_min") c.k_min = value.get<double>();
            else if (key == "k_max") c.k_max = value.get<double>();
            else if (key == "k_count") c.k_count = value.get<int>();
            else if (key == "out") c.out = value.get<std::string>();
            else if (key == "strict_positivity") c.strict_positivity = value.get<bool>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return c;
}

int run(const RunConfig& config, std::ostream& log) {
    try {
        validate(config);
        fs::create_directories(config.out);
        if (config.command == "forward") return cmd_forward(config, log);
        if (config.command == "invert") return cmd_invert(config, log);
        if (config.command == "spectral") return cmd_spectral(config, log);
        if (config.command == "roundtrip") return cmd_roundtrip(config, log);
        return cmd_compare(config, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const FormatError& e) {
        log << "format error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const ContractViolation& e) {
        log << "invalid input: " << e.what() << '\n';
        return kBadConfig;
    } catch (const Error& e) {
        log << e.module() << ": " << e.kind() << ": " << e.what() << '\n';
        try {
            write_json(fs::path(config.out) / "error.json", error_json(e), config);
        } catch (const std::exception&) {
        }
        return kSolverFailure;
    } catch (const std::exception& e) {
        log << "failure: " << e.what() << '\n';
        return kSolverFailure;
    }
}

int main(int argc, const char* const* argv, std::ostream& log) {
    CLI::App app{"Inverse problems for the half-line Schrodinger operator"};
    std::string command, potential, response, method, out, config_path;
    double L = 0, T = 0, tol = 0, k_min = 0, k_max = 0;
    std::size_t n = 0;
    int n_max = 0, k_count = 0;
    bool strict = false;

    app.add_option("command", command, "forward | invert | spectral | roundtrip | compare")->required();
    auto* o_pot = app.add_option("--potential", potential, "CSV file or zero, const:<c>, sine, step");
    auto* o_resp = app.add_option("--response", response, "response CSV (t,value) for invert/compare");
    auto* o_L = app.add_option("--L", L, "interval length for builtin potentials");
    auto* o_T = app.add_option("--T", T, "time horizon");
    auto* o_n = app.add_option("--n", n, "number of samples on [0, L]");
    auto* o_tol = app.add_option("--tol", tol, "Picard truncation tolerance");
    auto* o_method = app.add_option("--method", method, "bc | remling | gl | gl-classical | simon");
    auto* o_nmax = app.add_option("--n-max", n_max, "number of eigenpairs");
    auto* o_kmin = app.add_option("--k-min", k_min, "smallest k for m(-k^2)");
    auto* o_kmax = app.add_option("--k-max", k_max, "largest k for m(-k^2)");
    auto* o_kcount = app.add_option("--k-count", k_count, "number of k values");
    auto* o_out = app.add_option("--out", out, "output directory");
    auto* o_strict = app.add_flag("--strict-positivity", strict, "exit 4 when the connecting operator is not positive");
    app.add_option("--config", config_path, "JSON config; flags override it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        log << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        log << "config error: " << e.what() << '\n';
        return kBadConfig;
    }

    RunConfig c;
    if (!config_path.empty()) {
        try {
            c = load_config(config_path);
        } catch (const Error& e) {
            log << "config error: " << e.what() << '\n';
            return kBadConfig;
        }
    }
    c.command = command;
    if (o_pot->count()) c.potential = potential;
    if (o_resp->count()) c.response = response;
    if (o_L->count()) c.L = L;
    if (o_T->count()) c.T = T;
    if (o_n->count()) c.n = n;
    if (o_tol->count()) c.tol = tol;
    if (o_method->count()) c.method = method;
    if (o_nmax->count()) c.n_max = n_max;
    if (o_kmin->count()) c.k_min = k_min;
    if (o_kmax->count()) c.k_max = k_max;
    if (o_kcount->count()) c.k_count = k_count;
    if (o_out->count()) c.out = out;
    if (o_strict->count()) c.strict_positivity = strict;
    return run(c, log);
}

}  // namespace bcinv::cli
