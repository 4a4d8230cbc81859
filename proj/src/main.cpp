// lifeline: joint lifetime models in three interchangeable forms
// (marginal + copula diagonals, order-statistic laws, failure-rate
// profiles), with property checks, simulation, and model generation.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lifeline/archimedean.hpp"
#include "lifeline/convert.hpp"
#include "lifeline/copulas.hpp"
#include "lifeline/csvio.hpp"
#include "lifeline/errors.hpp"
#include "lifeline/hazard.hpp"
#include "lifeline/loadsharing.hpp"
#include "lifeline/modelspec.hpp"
#include "lifeline/montecarlo.hpp"
#include "lifeline/tabulated.hpp"
#include "lifeline/threads.hpp"

namespace {

using nlohmann::json;
using namespace lifeline;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPropertyFail = 2;

// ---------------------------------------------------------------------------
// Small IO helpers.

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_atomic(const std::string& path, const std::string& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot open '" + tmp + "' for writing");
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        out.flush();
        if (!out) throw DomainError("short write to '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DomainError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

// Tables go to --out when given, else to stdout, byte-identically.
void emit_table(const std::string& out_path, const CsvTable& table) {
    if (out_path.empty())
        std::cout << csv_to_string(table);
    else
        write_csv_atomic(out_path, table);
}

void emit_json(const std::string& out_path, const json& report) {
    const std::string body = report.dump(2) + "\n";
    if (out_path.empty())
        std::cout << body;
    else
        write_text_atomic(out_path, body);
}

std::vector<int> parse_int_list(const std::string& text, int r, const std::string& what) {
    std::vector<int> out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = text.find(',', pos);
        std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError(what + ": '" + text + "' must be comma-joined unit labels");
        int v = std::stoi(tok);
        if (v < 1 || v > r)
            throw DomainError(what + ": unit " + std::to_string(v) + " outside 1.." +
                              std::to_string(r));
        for (int seen : out)
            if (seen == v) throw DomainError(what + ": unit " + std::to_string(v) + " repeated");
        out.push_back(v);
        if (comma == std::string::npos) return out;
        pos = comma + 1;
    }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw DomainError(what + ": '" + tok + "' is not a number");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw DomainError(what + ": empty list");
    return out;
}

// ---------------------------------------------------------------------------
// Model resolution: JSON model files and the CSV tables this tool emits are
// both accepted wherever --model is, so conversions can be chained on their
// own outputs.

struct Resolved {
    std::string source;  // "json:<type>" or "csv:<representation>"
    int r = 0;
    std::string fingerprint;  // canonical JSON fingerprint (JSON inputs only)
    std::optional<OdThlsSpec> od;
    std::optional<ExThlsModel> ex;
    std::optional<OrderStatFamily> os;
    std::optional<MarginalSurvival> marg;
    std::optional<DiagonalFamily> diag;
    std::optional<RateProfile> prof;
    std::optional<GeneratorSpec> gen;
    std::vector<std::string> notes;
};

RealFn row_interpolant(const std::vector<double>& grid, std::vector<double> values,
                       DomainKind domain, Monotonicity mono) {
    TabulatedFunction fn(grid, std::move(values), domain, mono);
    return [fn](double x) { return fn(x); };
}

Resolved resolve_csv(const CsvTable& table, const std::string& path) {
    Resolved m;
    const auto& h = table.headers;
    if (h.size() < 2) throw DomainError("'" + path + "': table has too few columns for a model");
    if (h[0] == "t" && h[1] == "G1r") {
        const int r = static_cast<int>(h.size()) - 1;
        for (int k = 1; k <= r; ++k)
            if (h[static_cast<std::size_t>(k)] != "G" + std::to_string(k) + "r")
                throw DomainError("'" + path + "': expected order-statistic header G" +
                                  std::to_string(k) + "r, found '" +
                                  h[static_cast<std::size_t>(k)] + "'");
        std::vector<RealFn> fns;
        for (int k = 1; k <= r; ++k)
            fns.push_back(row_interpolant(table.columns[0], table.columns[static_cast<std::size_t>(k)],
                                          DomainKind::Time, Monotonicity::Decreasing));
        m.os = OrderStatFamily(r, std::move(fns), {}, table.columns[0].back());
        m.marg = marginal_from_orderstats(*m.os);
        m.r = r;
        m.source = "csv:orderstats";
        return m;
    }
    if (h[0] == "u" && h[1] == "delta2") {
        bool has_ginv = h.back() == "Ginv";
        const int r = static_cast<int>(h.size()) - (has_ginv ? 2 : 1) + 1;
        for (int d = 2; d <= r; ++d)
            if (h[static_cast<std::size_t>(d - 1)] != "delta" + std::to_string(d))
                throw DomainError("'" + path + "': expected diagonal header delta" +
                                  std::to_string(d) + ", found '" +
                                  h[static_cast<std::size_t>(d - 1)] + "'");
        // delta_d(0) = 0 and delta_d(1) = 1 hold exactly, so missing
        // endpoint rows are padded rather than demanded of the file.
        std::vector<double> grid = table.columns[0];
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(r - 1));
        for (int d = 2; d <= r; ++d) rows[static_cast<std::size_t>(d - 2)] = table.columns[static_cast<std::size_t>(d - 1)];
        if (grid.empty()) throw DomainError("'" + path + "': empty table");
        if (grid.front() > 0.0) {
            grid.insert(grid.begin(), 0.0);
            for (auto& row : rows) row.insert(row.begin(), 0.0);
        }
        if (grid.back() < 1.0) {
            grid.push_back(1.0);
            for (auto& row : rows) row.push_back(1.0);
        }
        std::vector<RealFn> fns;
        for (auto& row : rows)
            fns.push_back(row_interpolant(grid, std::move(row), DomainKind::UnitInterval,
                                          Monotonicity::Increasing));
        m.diag = DiagonalFamily(r, std::move(fns));
        if (has_ginv) {
            // Column Ginv holds Gbar^{-1}(u): reversing it tabulates Gbar.
            std::vector<double> t(table.columns.back().rbegin(), table.columns.back().rend());
            std::vector<double> u(table.columns[0].rbegin(), table.columns[0].rend());
            TabulatedFunction gbar(std::move(t), std::move(u), DomainKind::Time,
                                   Monotonicity::Decreasing);
            double horizon = gbar.back_x();
            m.marg = MarginalSurvival([gbar](double s) { return gbar(s); }, nullptr, horizon);
        }
        m.r = r;
        m.source = "csv:diagonals";
        return m;
    }
    if (h[0] == "t" && h[1] == "Lam1") {
        const int r = static_cast<int>(h.size()) - 1;
        for (int d = 1; d <= r; ++d)
            if (h[static_cast<std::size_t>(d)] != "Lam" + std::to_string(d))
                throw DomainError("'" + path + "': expected profile header Lam" +
                                  std::to_string(d) + ", found '" + h[static_cast<std::size_t>(d)] +
                                  "'");
        std::vector<RealFn> fns;
        for (int d = 1; d <= r; ++d)
            fns.push_back(row_interpolant(table.columns[0], table.columns[static_cast<std::size_t>(d)],
                                          DomainKind::Time, Monotonicity::None));
        m.prof = RateProfile(r, std::move(fns), table.columns[0]);
        m.r = r;
        m.source = "csv:profile";
        return m;
    }
    throw DomainError("'" + path + "': unrecognized table headers '" + h[0] + "," + h[1] +
                      ",...' (expected t,G1r,... or u,delta2,... or t,Lam1,...)");
}

Resolved resolve_model(const std::string& path) {
    const std::string text = read_text_file(path);
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw DomainError("'" + path + "' is empty");
    if (text[first] != '{') return resolve_csv(parse_csv(text), path);

    LoadedModel loaded = load_model_file(path);
    Resolved m;
    m.source = "json:" + loaded.type;
    m.r = loaded.r;
    m.fingerprint = canonical_model_fingerprint(text);
    m.od = std::move(loaded.odthls);
    m.ex = std::move(loaded.exthls);
    m.os = std::move(loaded.orderstats);
    m.marg = std::move(loaded.marginal);
    m.diag = std::move(loaded.diagonals);
    m.gen = std::move(loaded.generator);
    m.notes = std::move(loaded.notes);
    return m;
}

// ---------------------------------------------------------------------------
// Capability plumbing.  Each getter either reaches the requested
// representation through a conversion path or says exactly which link is
// missing.

[[noreturn]] void missing_capability(const Resolved& m, const std::string& wanted,
                                     const std::string& paths) {
    throw ContractError("model (" + m.source + ") cannot provide " + wanted +
                        "; available conversion paths need " + paths);
}

HazardModel need_hazard(const Resolved& m) {
    if (m.ex) return hazard_from_exthls(*m.ex);
    if (m.od) return hazard_from_odthls(*m.od);
    missing_capability(m, "a failure-rate (hazard) model",
                       "a rate table: odthls, thls, or exchangeable_thls");
}

OrderStatFamily need_orderstats(const Resolved& m) {
    if (m.os) return *m.os;
    if (m.od) return mixture_orderstats(*m.od);  // requires minimal stability
    if (m.diag && m.marg) return orderstat_from_diagonals(*m.diag, *m.marg);
    if (m.prof) return orderstats_from_profile(*m.prof);
    if (m.diag)
        missing_capability(m, "order-statistic laws",
                           "a marginal survival next to the diagonal sections (attach "
                           "\"marginal\" to the model file)");
    missing_capability(m, "order-statistic laws",
                       "a rate table, diagonals plus marginal, or a rate profile");
}

MarginalSurvival need_marginal(const Resolved& m) {
    if (m.marg) return *m.marg;
    if (m.os) return marginal_from_orderstats(*m.os);
    if (m.od) return marginal_from_orderstats(mixture_orderstats(*m.od));
    if (m.prof) return diagonals_from_profile(*m.prof).second;
    missing_capability(m, "a marginal survival",
                       "a marginal, order statistics, a rate table, or a rate profile");
}

// Diagonals alone serve u-domain quantities; time-domain ones also need the
// marginal, so the pair is fetched together where required.
DiagonalFamily need_diagonals(const Resolved& m) {
    if (m.diag) return *m.diag;
    if (m.os) return diagonals_from_orderstats(*m.os).first;
    if (m.od) return diagonals_from_orderstats(mixture_orderstats(*m.od)).first;
    if (m.prof) return diagonals_from_profile(*m.prof).first;
    missing_capability(m, "copula diagonal sections",
                       "diagonals, order statistics, a rate table, or a rate profile");
}

RateProfile need_profile(const Resolved& m) {
    if (m.prof) return *m.prof;
    if (m.ex) return m.ex->rate_profile();
    if (m.diag && m.marg) return profile_from_diagonals(*m.diag, *m.marg);
    if (m.os) return profile_from_orderstats(*m.os);
    if (m.od) return profile_from_orderstats(mixture_orderstats(*m.od));
    missing_capability(m, "a failure-rate profile",
                       "a rate profile, diagonals plus marginal, order statistics, or a rate "
                       "table");
}

double default_tmax(const Resolved& m) {
    if (m.os) return m.os->tstar();
    if (m.marg) return m.marg->tstar();
    if (m.prof) return m.prof->grid().back();
    return need_orderstats(m).tstar();
}

// ---------------------------------------------------------------------------
// convert

struct ConvertConfig {
    std::string from, to, model, out;
    int grid = 257;
    double tmax = 0.0;  // 0: use the model's working horizon
};

CsvTable emit_orderstats(const OrderStatFamily& os, int grid_n, double tmax) {
    CsvTable t;
    t.headers.push_back("t");
    t.columns.push_back(make_uniform_grid(0.0, tmax, grid_n));
    for (int k = 1; k <= os.r(); ++k) {
        t.headers.push_back("G" + std::to_string(k) + "r");
        std::vector<double> col;
        col.reserve(t.columns[0].size());
        for (double tt : t.columns[0]) col.push_back(os.survival(k, tt));
        t.columns.push_back(std::move(col));
    }
    return t;
}

CsvTable emit_profile(const RateProfile& prof, int grid_n, double tmax) {
    CsvTable t;
    t.headers.push_back("t");
    t.columns.push_back(make_uniform_grid(0.0, tmax, grid_n));
    for (int d = 1; d <= prof.r(); ++d) {
        t.headers.push_back("Lam" + std::to_string(d));
        std::vector<double> col;
        col.reserve(t.columns[0].size());
        for (double tt : t.columns[0]) col.push_back(prof.rate(d, tt));
        t.columns.push_back(std::move(col));
    }
    return t;
}

// With a marginal at hand the u-grid is taken as u_i = Gbar(t_i) over a
// uniform time grid and recorded in a trailing Ginv column (= t_i), which
// makes the table self-contained for the reverse conversion.  Without one,
// a plain uniform u-grid is written.
CsvTable emit_diagonals(const DiagonalFamily& diag, const MarginalSurvival* marg, int grid_n,
                        double tmax) {
    CsvTable t;
    t.headers.push_back("u");
    std::vector<double> ugrid;
    std::vector<double> ginv;
    if (marg) {
        std::vector<double> times = make_uniform_grid(0.0, tmax, grid_n);
        for (int i = grid_n - 1; i >= 0; --i) {
            ugrid.push_back((*marg)(times[static_cast<std::size_t>(i)]));
            ginv.push_back(times[static_cast<std::size_t>(i)]);
        }
    } else {
        ugrid = make_uniform_grid(0.0, 1.0, grid_n);
    }
    t.columns.push_back(ugrid);
    for (int d = 2; d <= diag.r(); ++d) {
        t.headers.push_back("delta" + std::to_string(d));
        std::vector<double> col;
        col.reserve(ugrid.size());
        for (double u : ugrid) col.push_back(diag(d, u));
        t.columns.push_back(std::move(col));
    }
    if (marg) {
        t.headers.push_back("Ginv");
        t.columns.push_back(std::move(ginv));
    }
    return t;
}

int run_convert(const ConvertConfig& cfg) {
    Resolved m = resolve_model(cfg.model);
    // The horizon is only needed by time-domain outputs, so it is computed
    // lazily: diagonals-only models can still roundtrip diagonals.
    auto tmax = [&]() { return cfg.tmax > 0.0 ? cfg.tmax : default_tmax(m); };

    // Pivot on the --from representation, then land on --to.
    if (cfg.from == "orderstats") {
        OrderStatFamily os = need_orderstats(m);
        if (cfg.to == "orderstats") {
            emit_table(cfg.out, emit_orderstats(os, cfg.grid, tmax()));
        } else if (cfg.to == "diagonals") {
            auto [diag, marg] = diagonals_from_orderstats(os);
            emit_table(cfg.out, emit_diagonals(diag, &marg, cfg.grid, tmax()));
        } else {
            emit_table(cfg.out, emit_profile(profile_from_orderstats(os), cfg.grid, tmax()));
        }
        return kExitOk;
    }
    if (cfg.from == "diagonals") {
        DiagonalFamily diag = need_diagonals(m);
        if (cfg.to == "diagonals") {
            std::optional<MarginalSurvival> marg;
            if (m.marg)
                marg = *m.marg;
            else if (m.os || m.od || m.prof)
                marg = need_marginal(m);
            emit_table(cfg.out, emit_diagonals(diag, marg ? &*marg : nullptr, cfg.grid,
                                               marg ? tmax() : 0.0));
        } else if (cfg.to == "orderstats") {
            emit_table(cfg.out,
                       emit_orderstats(orderstat_from_diagonals(diag, need_marginal(m)), cfg.grid,
                                       tmax()));
        } else {
            emit_table(cfg.out,
                       emit_profile(profile_from_diagonals(diag, need_marginal(m)), cfg.grid,
                                    tmax()));
        }
        return kExitOk;
    }
    // from == "profile"
    RateProfile prof = need_profile(m);
    if (cfg.to == "profile") {
        emit_table(cfg.out, emit_profile(prof, cfg.grid, tmax()));
    } else if (cfg.to == "orderstats") {
        emit_table(cfg.out, emit_orderstats(orderstats_from_profile(prof), cfg.grid, tmax()));
    } else {
        auto [diag, marg] = diagonals_from_profile(prof);
        emit_table(cfg.out, emit_diagonals(diag, &marg, cfg.grid, tmax()));
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// check

struct CheckConfig {
    std::string model, property, out;
    double tol = 1e-6;
    int grid = 64;
    int budget = 10000;
};

int run_check(const CheckConfig& cfg) {
    Resolved m = resolve_model(cfg.model);
    HazardModel hz = need_hazard(m);
    json report = {{"model", cfg.model}, {"source", m.source}, {"r", m.r},
                   {"property", cfg.property}};
    bool pass = false;
    if (cfg.property == "min-stable") {
        if (!(cfg.tol > 0.0)) throw DomainError("--tol must be positive");
        const double horizon = 3.0 * hz.time_scale();
        const auto grid = make_uniform_grid(horizon / cfg.grid, horizon, cfg.grid);
        MinStableReport rep = check_minimally_stable(hz, grid, cfg.tol);
        pass = rep.pass;
        report["pass"] = rep.pass;
        report["tol"] = rep.tol;
        report["max_violation"] = rep.max_violation;
        report["summary"] = rep.summary;
        if (!rep.pass) {
            report["witness"] = {{"set_A", rep.witness_A},
                                 {"set_B", rep.witness_B},
                                 {"t", rep.witness_t}};
        }
        if (m.od && m.r == 3) {
            // The three-unit characterization gives an exact verdict next to
            // the numeric probe.
            R3Report r3 = check_min_stable_r3(*m.od);
            report["r3_verdict"] = to_string(r3.verdict);
            report["r3_detail"] = r3.detail;
        }
    } else {  // exchangeable
        ExchangeableReport rep = check_exchangeable(hz, cfg.budget);
        pass = rep.pass;
        report["pass"] = rep.pass;
        report["probes_run"] = rep.probes_run;
        if (!rep.pass) report["witness"] = rep.witness;
    }
    emit_json(cfg.out, report);
    return pass ? kExitOk : kExitPropertyFail;
}

// ---------------------------------------------------------------------------
// eval

struct EvalConfig {
    std::string model, quantity, out;
    std::string t_list, u_list;
    int grid = 33;
    double tmax = 0.0;
};

struct Quantity {
    std::string name;  // marginal | orderstat | min | diagonal | profile | mu | psi | survivor
    int index = 0;
    std::vector<int> labels;
};

Quantity parse_quantity(const std::string& text, int r) {
    Quantity q;
    std::size_t colon = text.find(':');
    q.name = text.substr(0, colon == std::string::npos ? text.size() : colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto need_index = [&](int lo, int hi) {
        try {
            std::size_t used = 0;
            q.index = std::stoi(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
        } catch (const std::exception&) {
            throw DomainError("quantity '" + text + "': expected " + q.name + ":<int>");
        }
        if (q.index < lo || q.index > hi)
            throw DomainError("quantity '" + text + "': index outside " + std::to_string(lo) +
                              ".." + std::to_string(hi));
    };
    if (q.name == "marginal") {
        if (colon != std::string::npos) throw DomainError("quantity 'marginal' takes no index");
    } else if (q.name == "orderstat" || q.name == "min" || q.name == "diagonal" ||
               q.name == "profile" || q.name == "mu") {
        if (colon == std::string::npos)
            throw DomainError("quantity '" + text + "' needs an index, e.g. " + q.name + ":2");
        need_index(1, r);
    } else if (q.name == "psi") {
        if (colon == std::string::npos || arg.empty())
            throw DomainError("quantity 'psi' needs an ordered tuple, e.g. psi:1,3");
        q.labels = parse_int_list(arg, r, "psi tuple");
        if (static_cast<int>(q.labels.size()) >= r + 1)
            throw DomainError("psi tuple longer than r");
    } else if (q.name == "survivor") {
        if (colon == std::string::npos)
            throw DomainError("quantity 'survivor' needs a set, e.g. survivor:1,2 "
                              "(survivor: for the empty set)");
        q.labels = parse_int_list(arg, r, "survivor set");
    } else {
        throw DomainError("unknown quantity '" + text + "' (one of marginal, orderstat:k, "
                          "min:d, diagonal:d, profile:d, mu:d, psi:j, survivor:A)");
    }
    return q;
}

std::string label_suffix(const std::vector<int>& labels) {
    std::string s;
    for (std::size_t i = 0; i < labels.size(); ++i)
        s += (i ? "_" : "") + std::to_string(labels[i]);
    return s;
}

int run_eval(const EvalConfig& cfg) {
    Resolved m = resolve_model(cfg.model);
    Quantity q = parse_quantity(cfg.quantity, m.r);

    const bool u_domain = (q.name == "diagonal");
    std::vector<double> grid;
    if (u_domain) {
        grid = cfg.u_list.empty() ? make_uniform_grid(0.0, 1.0, cfg.grid)
                                  : parse_double_list(cfg.u_list, "--u");
        for (double u : grid)
            if (u < 0.0 || u > 1.0) throw DomainError("--u values must lie in [0, 1]");
    } else {
        if (!cfg.u_list.empty())
            throw DomainError("--u applies only to diagonal:d; use --t for time quantities");
        grid = cfg.t_list.empty()
                   ? make_uniform_grid(0.0, cfg.tmax > 0.0 ? cfg.tmax : default_tmax(m), cfg.grid)
                   : parse_double_list(cfg.t_list, "--t");
        for (double t : grid)
            if (t < 0.0) throw DomainError("--t values must be nonnegative");
    }

    CsvTable out;
    out.headers.push_back(u_domain ? "u" : "t");
    out.columns.push_back(grid);
    std::vector<double> col;
    col.reserve(grid.size());
    std::string header;

    if (q.name == "marginal") {
        header = "Gbar";
        MarginalSurvival marg = need_marginal(m);
        for (double t : grid) col.push_back(marg(t));
    } else if (q.name == "orderstat") {
        header = "G" + std::to_string(q.index) + "r";
        OrderStatFamily os = need_orderstats(m);
        for (double t : grid) col.push_back(os.survival(q.index, t));
    } else if (q.name == "diagonal") {
        header = "delta" + std::to_string(q.index);
        if (q.index == 1) {
            col = grid;  // delta_1 is the identity for every model
        } else {
            DiagonalFamily diag = need_diagonals(m);
            for (double u : grid) col.push_back(diag(q.index, u));
        }
    } else if (q.name == "min") {
        header = "min" + std::to_string(q.index);
        if (m.ex) {
            for (double t : grid) col.push_back(m.ex->min_survival(q.index, t));
        } else if (m.diag && m.marg) {
            for (double t : grid)
                col.push_back(min_survival_from_diagonals(*m.diag, *m.marg, q.index, t));
        } else {
            OrderStatFamily os = need_orderstats(m);
            for (double t : grid) col.push_back(min_survival_from_orderstats(os, q.index, t));
        }
    } else if (q.name == "profile") {
        header = "Lam" + std::to_string(q.index);
        RateProfile prof = need_profile(m);
        for (double t : grid) col.push_back(prof.rate(q.index, t));
    } else if (q.name == "mu") {
        header = "mu" + std::to_string(q.index);
        if (m.source == "json:schur_constant") {
            for (double t : grid) col.push_back(schur_mu(*m.marg, q.index, t));
        } else {
            // Per-unit rate of the d-minimum given no failures yet.
            RateProfile prof = need_profile(m);
            for (double t : grid) col.push_back(prof.rate(q.index, t) / q.index);
        }
    } else if (q.name == "psi") {
        header = "Psi_" + label_suffix(q.labels);
        HazardModel hz = need_hazard(m);
        for (double t : grid) col.push_back(psi(hz, q.labels, t));
    } else {  // survivor
        header = q.labels.empty() ? "S_none" : "S_" + label_suffix(q.labels);
        if (m.ex || m.od) {
            HazardModel hz = need_hazard(m);
            for (double t : grid) col.push_back(survivor_set_prob(hz, q.labels, t));
        } else {
            OrderStatFamily os = need_orderstats(m);
            for (double t : grid)
                col.push_back(survivor_set_pmf(os, static_cast<int>(q.labels.size()), t));
        }
    }
    out.headers.push_back(header);
    out.columns.push_back(std::move(col));
    emit_table(cfg.out, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate / gof

struct SimulateConfig {
    std::string model, out;
    int n = 0;
    std::uint64_t seed = 0;
    int grid = 64;
};

int run_simulate(const SimulateConfig& cfg) {
    if (cfg.out.empty()) throw DomainError("simulate requires --out for the batch file");
    Resolved m = resolve_model(cfg.model);
    HazardModel hz = need_hazard(m);
    SampleOptions options;
    options.fingerprint = m.fingerprint;
    SampleBatch batch = sample(hz, cfg.n, cfg.seed, options);
    write_batch_csv(cfg.out, batch);
    json summary = {{"model", cfg.model},       {"n", batch.n()},
                    {"seed", cfg.seed},         {"ties_resampled", batch.ties_resampled},
                    {"fingerprint", m.fingerprint}, {"grid", cfg.grid},
                    {"out", cfg.out}};
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

struct GofConfig {
    std::string model, batch, out;
    int grid = 64;
    double sigma = 4.0;
    double tmax = 0.0;
};

int run_gof(const GofConfig& cfg) {
    Resolved m = resolve_model(cfg.model);
    SampleBatch batch = read_batch_csv(cfg.batch);
    if (batch.r != m.r)
        throw DomainError("batch has r=" + std::to_string(batch.r) + " but the model has r=" +
                          std::to_string(m.r));
    if (!batch.model_fingerprint.empty() && !m.fingerprint.empty() &&
        batch.model_fingerprint != m.fingerprint)
        throw DomainError("batch '" + cfg.batch + "' was sampled from a different model (" +
                          batch.model_fingerprint + " vs " + m.fingerprint + ")");

    OrderStatFamily os = need_orderstats(m);
    const double tmax = cfg.tmax > 0.0 ? cfg.tmax : os.tstar();
    const auto grid = make_uniform_grid(tmax / cfg.grid, tmax, cfg.grid);
    const int max_psi_len = (m.ex || m.od) && m.r <= 4 ? 2 : 0;
    EmpiricalReport emp = empirical_stats(batch, grid, max_psi_len);

    std::vector<GofSeries> series;
    for (int k = 1; k <= m.r; ++k) {
        GofSeries s;
        s.name = "G" + std::to_string(k) + "r";
        s.empirical = emp.orderstat[static_cast<std::size_t>(k - 1)].value;
        for (double t : grid) s.analytic.push_back(os.survival(k, t));
        series.push_back(std::move(s));
    }
    if (max_psi_len > 0) {
        HazardModel hz = need_hazard(m);
        for (const auto& [tuple, curve] : emp.psi) {
            if (static_cast<int>(tuple.size()) > max_psi_len) continue;
            GofSeries s;
            s.name = "Psi_" + label_suffix(tuple);
            s.empirical = curve.value;
            for (double t : grid) s.analytic.push_back(psi(hz, tuple, t));
            series.push_back(std::move(s));
        }
    }
    GofVerdict verdict = gof_compare(series, batch.n(), cfg.sigma);
    json report = {{"model", cfg.model},
                   {"batch", cfg.batch},
                   {"n", batch.n()},
                   {"series", series.size()},
                   {"points", verdict.points},
                   {"sigma", verdict.sigma_mult},
                   {"pass", verdict.pass},
                   {"max_abs_z", verdict.max_abs_z},
                   {"bonferroni", verdict.bonferroni},
                   {"worst", {{"curve", verdict.worst.curve},
                              {"index", verdict.worst.index},
                              {"analytic", verdict.worst.analytic},
                              {"empirical", verdict.worst.empirical},
                              {"z", verdict.worst.z}}}};
    if (!verdict.failures.empty()) {
        json fails = json::array();
        for (const auto& f : verdict.failures)
            fails.push_back({{"curve", f.curve},
                             {"index", f.index},
                             {"analytic", f.analytic},
                             {"empirical", f.empirical},
                             {"z", f.z}});
        report["failures"] = fails;
    }
    emit_json(cfg.out, report);
    return verdict.pass ? kExitOk : kExitPropertyFail;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateConfig {
    std::string L_text, out;
    std::uint64_t seed = 0;
    bool uniform_frailty = false;
};

int run_generate(const GenerateConfig& cfg) {
    std::vector<double> L = parse_double_list(cfg.L_text, "--L");
    GeneratedModel g = generate_singleton_min_stable(L, cfg.seed, cfg.uniform_frailty);
    const std::string body = odthls_to_json(g.get());
    if (cfg.out.empty())
        std::cout << body;
    else
        write_text_atomic(cfg.out, body);
    json summary = {{"r", g.get().r()},
                    {"seed", cfg.seed},
                    {"uniform_frailty", cfg.uniform_frailty},
                    {"degenerate_to_exchangeable", g.degenerate_to_exchangeable},
                    {"notes", g.notes}};
    if (!cfg.out.empty()) {
        summary["out"] = cfg.out;
        std::cout << summary.dump(2) << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// copula: construction trees evaluated on load, serialized as JSON.

struct TreeEval {
    CopulaSpec copula;
    RealFn seed_diag;  // diagonal of the 2-seed when the tree is a cyclic chain
    bool chain = false;
};

json load_tree_source(const std::string& source) {
    // Inline leaves: product:<r> and quadratic:<theta>; anything else is a
    // path to a serialized tree.
    if (source.rfind("product:", 0) == 0) {
        int r = 0;
        try {
            r = std::stoi(source.substr(8));
        } catch (const std::exception&) {
            throw DomainError("copula source '" + source + "': expected product:<r>");
        }
        return {{"op", "product"}, {"r", r}};
    }
    if (source.rfind("quadratic:", 0) == 0) {
        double theta = 0.0;
        try {
            theta = std::stod(source.substr(10));
        } catch (const std::exception&) {
            throw DomainError("copula source '" + source + "': expected quadratic:<theta>");
        }
        return {{"op", "quadratic"}, {"theta", theta}};
    }
    try {
        return json::parse(read_text_file(source));
    } catch (const json::parse_error& e) {
        throw DomainError("copula tree '" + source + "': invalid JSON: " + e.what());
    }
}

TreeEval eval_tree(const json& t) {
    if (!t.is_object() || !t.contains("op") || !t.at("op").is_string())
        throw DomainError("copula tree: every node needs a string \"op\"");
    const std::string op = t.at("op").get<std::string>();
    auto subtree = [&t, &op](const char* key) -> const json& {
        if (!t.contains(key))
            throw DomainError("copula tree: op '" + op + "' needs a \"" + key + "\" subtree");
        return t.at(key);
    };
    if (op == "product") {
        if (!t.contains("r") || !t.at("r").is_number_integer())
            throw DomainError("copula tree: product needs integer \"r\"");
        return {product_copula(t.at("r").get<int>()), nullptr, false};
    }
    if (op == "quadratic") {
        if (!t.contains("theta") || !t.at("theta").is_number())
            throw DomainError("copula tree: quadratic needs numeric \"theta\"");
        return {quadratic_seed(t.at("theta").get<double>()), nullptr, false};
    }
    if (op == "cyclic3") {
        TreeEval seed = eval_tree(subtree("seed"));
        const bool reversed = t.value("reversed", false);
        CyclicPair pair = cyclic3(seed.copula);
        auto sp = std::make_shared<CopulaSpec>(seed.copula);
        RealFn diag = [sp](double u) { return (*sp)({u, u}); };
        return {reversed ? std::move(pair.reversed) : std::move(pair.forward), diag, true};
    }
    if (op == "extend") {
        TreeEval base = eval_tree(subtree("base"));
        if (!base.chain)
            throw DomainError("copula tree: extend applies to cyclic3/extend chains only");
        if (!t.contains("to") || !t.at("to").is_number_integer())
            throw DomainError("copula tree: extend needs integer \"to\"");
        const int to = t.at("to").get<int>();
        if (to <= base.copula.r())
            throw DomainError("copula tree: extend \"to\"=" + std::to_string(to) +
                              " does not exceed the base dimension " +
                              std::to_string(base.copula.r()));
        CopulaSpec cur = base.copula;
        for (int n = base.copula.r() + 1; n <= to; ++n)
            cur = extend_cyclic(cur, base.seed_diag).copula;
        return {std::move(cur), base.seed_diag, true};
    }
    if (op == "mix") {
        TreeEval base = eval_tree(subtree("base"));
        TreeEval plus = eval_tree(subtree("plus"));
        TreeEval minus = eval_tree(subtree("minus"));
        for (const char* key : {"alpha", "d_low", "c_high"})
            if (!t.contains(key) || !t.at(key).is_number())
                throw DomainError(std::string("copula tree: mix needs numeric \"") + key + "\"");
        return {negative_mixture(base.copula, plus.copula, minus.copula,
                                 t.at("alpha").get<double>(), t.at("d_low").get<double>(),
                                 t.at("c_high").get<double>()),
                nullptr, false};
    }
    if (op == "symmetrize") {
        TreeEval base = eval_tree(subtree("base"));
        return {symmetrize(base.copula), nullptr, false};
    }
    throw DomainError("copula tree: unknown op '" + op +
                      "' (one of product, quadratic, cyclic3, extend, mix, symmetrize)");
}

void write_tree(const std::string& out, const json& tree) {
    const std::string body = tree.dump(2) + "\n";
    if (out.empty())
        std::cout << body;
    else
        write_text_atomic(out, body);
}

struct CopulaConfig {
    std::string seed, in, base, plus, minus, out, property;
    int to = 0;
    double alpha = 0.0, d_low = 0.0, c_high = 0.0;
    int grid = 33;
    double tol = 1e-9;
    bool reversed = false;
};

int run_copula_cyclic3(const CopulaConfig& cfg) {
    json tree = {{"op", "cyclic3"}, {"seed", load_tree_source(cfg.seed)}};
    if (cfg.reversed) tree["reversed"] = true;
    eval_tree(tree);  // validates the construction before anything is written
    write_tree(cfg.out, tree);
    return kExitOk;
}

int run_copula_extend(const CopulaConfig& cfg) {
    json tree = {{"op", "extend"}, {"to", cfg.to}, {"base", load_tree_source(cfg.in)}};
    eval_tree(tree);
    write_tree(cfg.out, tree);
    return kExitOk;
}

int run_copula_mix(const CopulaConfig& cfg) {
    json tree = {{"op", "mix"},
                 {"alpha", cfg.alpha},
                 {"d_low", cfg.d_low},
                 {"c_high", cfg.c_high},
                 {"base", load_tree_source(cfg.base)},
                 {"plus", load_tree_source(cfg.plus)},
                 {"minus", load_tree_source(cfg.minus)}};
    eval_tree(tree);
    write_tree(cfg.out, tree);
    return kExitOk;
}

int run_copula_symmetrize(const CopulaConfig& cfg) {
    json tree = {{"op", "symmetrize"}, {"base", load_tree_source(cfg.in)}};
    eval_tree(tree);
    write_tree(cfg.out, tree);
    return kExitOk;
}

int run_copula_check(const CopulaConfig& cfg) {
    TreeEval ev = eval_tree(load_tree_source(cfg.in));
    SymmetryReport rep = check_symmetries(ev.copula, cfg.grid, cfg.tol);
    const SymmetryCheck& chk = cfg.property == "dd" ? rep.dd : rep.exchangeable;
    json report = {{"tree", cfg.in},
                   {"r", ev.copula.r()},
                   {"provenance", ev.copula.provenance()},
                   {"property", cfg.property},
                   {"pass", chk.pass},
                   {"max_dev", chk.max_dev},
                   {"note", chk.note}};
    if (!chk.pass) {
        json witness = {{"point", chk.witness_point}};
        if (!chk.witness_a.empty()) witness["subset_a"] = chk.witness_a;
        if (!chk.witness_b.empty()) witness["subset_b"] = chk.witness_b;
        report["witness"] = witness;
    }
    emit_json(cfg.out, report);
    return chk.pass ? kExitOk : kExitPropertyFail;
}

// ---------------------------------------------------------------------------
// archimedean: generator-centric helpers.

struct ArchConfig {
    std::string model, out;
    int grid = 257;
};

int run_arch_diagonals(const ArchConfig& cfg) {
    Resolved m = resolve_model(cfg.model);
    DiagonalFamily diag = need_diagonals(m);
    emit_table(cfg.out, emit_diagonals(diag, nullptr, cfg.grid, 0.0));
    return kExitOk;
}

int run_arch_recover(const ArchConfig& cfg) {
    Resolved m = resolve_model(cfg.model);
    json report = {{"model", cfg.model}, {"source", m.source}, {"r", m.r}};
    GeneratorSpec gen = [&]() {
        if (m.gen) {
            // archimedean models carry their generator (tabulated_delta
            // families recover it at load time).
            report["generator"] = "from-model";
            return *m.gen;
        }
        DiagonalFamily diag = need_diagonals(m);
        const int r = m.r;
        RecoveredGenerator rec =
            recover_generator([diag, r](double u) { return diag(r, u); }, r);
        report["generator"] = "recovered-here";
        report["iterations"] = rec.iterations;
        report["converged"] = rec.converged;
        for (const auto& n : rec.notes) m.notes.push_back(n);
        if (!rec.converged)
            throw ConvergenceError("generator recovery did not converge; " +
                                   (rec.notes.empty() ? std::string("no details") : rec.notes.back()));
        return rec.gen;
    }();
    // Roundtrip residual: the recovered generator must reproduce the top
    // diagonal it was derived from.
    DiagonalFamily source_diag = need_diagonals(m);
    DiagonalFamily round = arch_diagonal_family(gen, m.r);
    double worst = 0.0;
    for (int i = 1; i <= 89; ++i) {
        const double u = 0.05 + 0.90 * (i - 1) / 88.0;
        worst = std::max(worst, std::fabs(round(m.r, u) - source_diag(m.r, u)));
    }
    report["roundtrip_sup_dev"] = worst;
    report["notes"] = m.notes;
    if (!cfg.out.empty()) {
        emit_table(cfg.out, emit_diagonals(round, nullptr, cfg.grid, 0.0));
        report["out"] = cfg.out;
    }
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lifeline: joint lifetime models (marginal + copula diagonals, order-statistic "
                 "laws, failure-rate profiles) with conversions, property checks, simulation, "
                 "and generators"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (env LIFELINE_THREADS)")
        ->envname("LIFELINE_THREADS");

    ConvertConfig convert_cfg;
    auto* sc_convert = app.add_subcommand(
        "convert", "Convert between the orderstats / diagonals / profile representations");
    sc_convert->add_option("--from", convert_cfg.from, "input representation")
        ->required()
        ->check(CLI::IsMember({"orderstats", "diagonals", "profile"}));
    sc_convert->add_option("--to", convert_cfg.to, "output representation")
        ->required()
        ->check(CLI::IsMember({"orderstats", "diagonals", "profile"}));
    sc_convert->add_option("--model", convert_cfg.model, "model file (JSON) or emitted CSV")
        ->required();
    sc_convert->add_option("--out", convert_cfg.out, "output CSV path (stdout when absent)");
    sc_convert->add_option("--grid", convert_cfg.grid, "number of grid points")
        ->check(CLI::Range(9, 100001));
    sc_convert->add_option("--tmax", convert_cfg.tmax, "time horizon (default: model working horizon)");

    CheckConfig check_cfg;
    auto* sc_check = app.add_subcommand("check", "Check a model property, with witnesses");
    sc_check->add_option("--model", check_cfg.model, "model file")->required();
    sc_check->add_option("--property", check_cfg.property, "property to check")
        ->required()
        ->check(CLI::IsMember({"exchangeable", "min-stable"}));
    sc_check->add_option("--tol", check_cfg.tol, "tolerance for min-stable");
    sc_check->add_option("--grid", check_cfg.grid, "time-grid points for min-stable")
        ->check(CLI::Range(2, 4096));
    sc_check->add_option("--budget", check_cfg.budget, "probe budget for exchangeable")
        ->check(CLI::Range(10, 10000000));
    sc_check->add_option("--out", check_cfg.out, "write the JSON report here (stdout otherwise)");

    EvalConfig eval_cfg;
    auto* sc_eval = app.add_subcommand("eval", "Tabulate a model quantity on a grid");
    sc_eval->add_option("--model", eval_cfg.model, "model file (JSON) or emitted CSV")->required();
    sc_eval->add_option("--quantity", eval_cfg.quantity,
                        "marginal | orderstat:k | min:d | diagonal:d | profile:d | mu:d | "
                        "psi:j1,j2 | survivor:A")
        ->required();
    sc_eval->add_option("--t", eval_cfg.t_list, "explicit comma-joined times");
    sc_eval->add_option("--u", eval_cfg.u_list, "explicit comma-joined u values (diagonal:d)");
    sc_eval->add_option("--grid", eval_cfg.grid, "grid points when --t/--u absent")
        ->check(CLI::Range(1, 100001));
    sc_eval->add_option("--tmax", eval_cfg.tmax, "time horizon for the default grid");
    sc_eval->add_option("--out", eval_cfg.out, "output CSV path (stdout when absent)");

    SimulateConfig sim_cfg;
    auto* sc_sim = app.add_subcommand("simulate", "Draw a reproducible sample batch");
    sc_sim->add_option("--model", sim_cfg.model, "model file (rate-table types)")->required();
    sc_sim->add_option("--n", sim_cfg.n, "number of replications")->required()
        ->check(CLI::Range(1, 100000000));
    sc_sim->add_option("--seed", sim_cfg.seed, "RNG seed")->required();
    sc_sim->add_option("--grid", sim_cfg.grid, "suggested comparison grid (recorded only)")
        ->check(CLI::Range(2, 4096));
    sc_sim->add_option("--out", sim_cfg.out, "batch CSV path")->required();

    GofConfig gof_cfg;
    auto* sc_gof = app.add_subcommand("gof", "Compare a sample batch against model curves");
    sc_gof->add_option("--model", gof_cfg.model, "model file")->required();
    sc_gof->add_option("--batch", gof_cfg.batch, "batch CSV from simulate")->required();
    sc_gof->add_option("--grid", gof_cfg.grid, "comparison grid points")
        ->check(CLI::Range(2, 4096));
    sc_gof->add_option("--sigma", gof_cfg.sigma, "z-threshold (default 4)");
    sc_gof->add_option("--tmax", gof_cfg.tmax, "comparison horizon");
    sc_gof->add_option("--out", gof_cfg.out, "write the JSON report here (stdout otherwise)");

    GenerateConfig gen_cfg;
    auto* sc_gen = app.add_subcommand(
        "generate", "Generate a random minimally stable rate table with stage totals L");
    sc_gen->add_option("--L", gen_cfg.L_text, "stage totals, e.g. 1,1,2")->required();
    sc_gen->add_option("--seed", gen_cfg.seed, "RNG seed")->required();
    sc_gen->add_flag("--uniform-frailty", gen_cfg.uniform_frailty,
                     "pin per-unit rates to Lambda/(r-k)");
    sc_gen->add_option("--out", gen_cfg.out, "model JSON path (stdout when absent)");

    CopulaConfig cop_cfg;
    auto* sc_cop = app.add_subcommand("copula", "Build and check copula construction trees");
    sc_cop->require_subcommand(1);
    auto* cc_cyc = sc_cop->add_subcommand("cyclic3", "Three-dimensional cyclic construction");
    cc_cyc->add_option("--seed", cop_cfg.seed, "2-copula: product:2, quadratic:<theta>, or tree file")
        ->required();
    cc_cyc->add_flag("--reversed", cop_cfg.reversed, "use the reversed orientation");
    cc_cyc->add_option("--out", cop_cfg.out, "tree JSON path (stdout when absent)");
    auto* cc_ext = sc_cop->add_subcommand("extend", "Extend a cyclic chain to dimension n");
    cc_ext->add_option("--in", cop_cfg.in, "cyclic3/extend tree")->required();
    cc_ext->add_option("--to", cop_cfg.to, "target dimension")->required()
        ->check(CLI::Range(4, 24));
    cc_ext->add_option("--out", cop_cfg.out, "tree JSON path (stdout when absent)");
    auto* cc_mix = sc_cop->add_subcommand("mix", "Signed mixture D + alpha (C1 - C2)");
    cc_mix->add_option("--base", cop_cfg.base, "exchangeable base tree")->required();
    cc_mix->add_option("--plus", cop_cfg.plus, "added copula tree")->required();
    cc_mix->add_option("--minus", cop_cfg.minus, "subtracted copula tree")->required();
    cc_mix->add_option("--alpha", cop_cfg.alpha, "mixture weight")->required();
    cc_mix->add_option("--d-low", cop_cfg.d_low, "certified lower bound on the base density")
        ->required();
    cc_mix->add_option("--c-high", cop_cfg.c_high,
                       "certified upper bound on |density(C1) - density(C2)|")
        ->required();
    cc_mix->add_option("--out", cop_cfg.out, "tree JSON path (stdout when absent)");
    auto* cc_sym = sc_cop->add_subcommand("symmetrize", "Average a copula over label permutations");
    cc_sym->add_option("--in", cop_cfg.in, "input tree")->required();
    cc_sym->add_option("--out", cop_cfg.out, "tree JSON path (stdout when absent)");
    auto* cc_chk = sc_cop->add_subcommand("check", "Check diagonal-dependence or exchangeability");
    cc_chk->add_option("--in", cop_cfg.in, "input tree")->required();
    cc_chk->add_option("--property", cop_cfg.property, "property to check")
        ->required()
        ->check(CLI::IsMember({"dd", "exchangeable"}));
    cc_chk->add_option("--grid", cop_cfg.grid, "check-grid points per axis")
        ->check(CLI::Range(9, 257));
    cc_chk->add_option("--tol", cop_cfg.tol, "deviation tolerance");
    cc_chk->add_option("--out", cop_cfg.out, "write the JSON report here (stdout otherwise)");

    ArchConfig arch_cfg;
    auto* sc_arch = app.add_subcommand("archimedean", "Generator diagnostics");
    sc_arch->require_subcommand(1);
    auto* ar_diag = sc_arch->add_subcommand("diagonals", "Emit delta_2..delta_r as CSV");
    ar_diag->add_option("--model", arch_cfg.model, "model file")->required();
    ar_diag->add_option("--grid", arch_cfg.grid, "u-grid points")->check(CLI::Range(9, 100001));
    ar_diag->add_option("--out", arch_cfg.out, "output CSV path (stdout when absent)");
    auto* ar_rec = sc_arch->add_subcommand(
        "recover", "Recover the generator from the model's top diagonal and report the residual");
    ar_rec->add_option("--model", arch_cfg.model, "model file")->required();
    ar_rec->add_option("--grid", arch_cfg.grid, "u-grid points for --out")
        ->check(CLI::Range(9, 100001));
    ar_rec->add_option("--out", arch_cfg.out, "emit the recovered diagonals as CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // --help: full grammar, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::endl;
        return kExitUsage;
    }
    if (threads > 0) set_thread_count(threads);

    try {
        if (*sc_convert) return run_convert(convert_cfg);
        if (*sc_check) return run_check(check_cfg);
        if (*sc_eval) return run_eval(eval_cfg);
        if (*sc_sim) return run_simulate(sim_cfg);
        if (*sc_gof) return run_gof(gof_cfg);
        if (*sc_gen) return run_generate(gen_cfg);
        if (*sc_cop) {
            if (*cc_cyc) return run_copula_cyclic3(cop_cfg);
            if (*cc_ext) return run_copula_extend(cop_cfg);
            if (*cc_mix) return run_copula_mix(cop_cfg);
            if (*cc_sym) return run_copula_symmetrize(cop_cfg);
            return run_copula_check(cop_cfg);
        }
        if (*sc_arch) {
            if (*ar_diag) return run_arch_diagonals(arch_cfg);
            return run_arch_recover(arch_cfg);
        }
    } catch (const PropertyFailure& e) {
        std::cerr << "property check failed: " << e.what() << std::endl;
        return kExitPropertyFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    }
    return kExitUsage;
}
