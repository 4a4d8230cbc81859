#include "lifeline/modelspec.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "lifeline/combinatorics.hpp"
#include "lifeline/convert.hpp"
#include "lifeline/errors.hpp"
#include "lifeline/tabulated.hpp"

namespace lifeline {
namespace {

using nlohmann::json;

std::string in_quotes(const std::string& s) { return "'" + s + "'"; }

// Strict envelope rule: every present key must be expected, every required
// key must be present.
void expect_keys(const json& obj, const std::string& ctx,
                 std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional) {
    auto known = [&](const std::string& k) {
        for (const char* r : required)
            if (k == r) return true;
        for (const char* o : optional)
            if (k == o) return true;
        return false;
    };
    for (const auto& item : obj.items()) {
        if (!known(item.key())) {
            std::string allowed;
            for (const char* r : required) allowed += std::string(allowed.empty() ? "" : ", ") + r;
            for (const char* o : optional) allowed += std::string(", ") + o + "?";
            throw DomainError("model file: unknown key " + in_quotes(item.key()) + " in " + ctx +
                              " (allowed: " + allowed + ")");
        }
    }
    for (const char* r : required)
        if (!obj.contains(r))
            throw DomainError("model file: " + ctx + " is missing required key " + in_quotes(r));
}

const json& member(const json& obj, const std::string& ctx, const char* key) {
    if (!obj.contains(key))
        throw DomainError("model file: " + ctx + " is missing required key " + in_quotes(key));
    return obj.at(key);
}

double get_double(const json& obj, const std::string& ctx, const char* key) {
    const json& v = member(obj, ctx, key);
    if (!v.is_number())
        throw DomainError("model file: " + ctx + "." + key + " must be a number");
    return v.get<double>();
}

double get_positive(const json& obj, const std::string& ctx, const char* key) {
    double v = get_double(obj, ctx, key);
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("model file: " + ctx + "." + key + " must be finite and positive, got " +
                          std::to_string(v));
    return v;
}

int get_int(const json& obj, const std::string& ctx, const char* key) {
    const json& v = member(obj, ctx, key);
    if (!v.is_number_integer())
        throw DomainError("model file: " + ctx + "." + key + " must be an integer");
    return v.get<int>();
}

std::string get_string(const json& obj, const std::string& ctx, const char* key) {
    const json& v = member(obj, ctx, key);
    if (!v.is_string())
        throw DomainError("model file: " + ctx + "." + key + " must be a string");
    return v.get<std::string>();
}

std::vector<double> get_double_array(const json& v, const std::string& ctx) {
    if (!v.is_array() || v.empty())
        throw DomainError("model file: " + ctx + " must be a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number())
            throw DomainError("model file: " + ctx + " must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// "2,1" -> {2, 1}; labels are 1-based unit indices, duplicates rejected.
std::vector<int> parse_labels(const std::string& key, int r, const std::string& ctx) {
    std::vector<int> labels;
    if (key.empty()) return labels;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = key.find(',', pos);
        std::string tok =
            key.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError("model file: " + ctx + " key " + in_quotes(key) +
                              " must be comma-joined unit labels like \"2,1\"");
        int v = std::stoi(tok);
        if (v < 1 || v > r)
            throw DomainError("model file: " + ctx + " key " + in_quotes(key) + " names unit " +
                              std::to_string(v) + " outside 1.." + std::to_string(r));
        for (int seen : labels)
            if (seen == v)
                throw DomainError("model file: " + ctx + " key " + in_quotes(key) +
                                  " repeats unit " + std::to_string(v));
        labels.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return labels;
}

std::string join_labels(const std::vector<int>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(labels[i]);
    }
    return out;
}

// One {"<unit>": rate, ...} successor block.
std::map<int, double> parse_successor_rates(const json& v, int r, const std::string& ctx) {
    if (!v.is_object())
        throw DomainError("model file: " + ctx + " must map unit labels to rates");
    std::map<int, double> out;
    for (const auto& item : v.items()) {
        std::vector<int> lab = parse_labels(item.key(), r, ctx);
        if (lab.size() != 1)
            throw DomainError("model file: " + ctx + " key " + in_quotes(item.key()) +
                              " must be a single unit label");
        if (!item.value().is_number())
            throw DomainError("model file: " + ctx + "." + item.key() + " must be a number");
        out[lab[0]] = item.value().get<double>();
    }
    return out;
}

MarginalSurvival parse_marginal(const json& m, const std::string& ctx) {
    if (!m.is_object())
        throw DomainError("model file: " + ctx + " must be an object with a \"kind\" field");
    std::string kind = get_string(m, ctx, "kind");
    if (kind == "exponential") {
        expect_keys(m, ctx, {"kind", "rate"}, {});
        double rate = get_positive(m, ctx, "rate");
        return MarginalSurvival([rate](double t) { return std::exp(-rate * t); },
                                [rate](double t) { return rate * std::exp(-rate * t); });
    }
    if (kind == "power_ratio") {
        // Gbar(t) = (t^beta + 1)^{-alpha}, the heavy-tailed marginal paired
        // with the power-ratio diagonal family.
        expect_keys(m, ctx, {"kind", "alpha", "beta"}, {});
        double alpha = get_positive(m, ctx, "alpha");
        double beta = get_double(m, ctx, "beta");
        if (!(beta >= 1.0) || !std::isfinite(beta))
            throw DomainError("model file: " + ctx + ".beta must be >= 1, got " +
                              std::to_string(beta));
        auto gbar = [alpha, beta](double t) { return std::pow(std::pow(t, beta) + 1.0, -alpha); };
        auto dens = [alpha, beta](double t) {
            return alpha * beta * std::pow(t, beta - 1.0) *
                   std::pow(std::pow(t, beta) + 1.0, -alpha - 1.0);
        };
        return MarginalSurvival(gbar, dens);
    }
    if (kind == "tabulated") {
        expect_keys(m, ctx, {"kind", "grid", "values"}, {});
        std::vector<double> grid = get_double_array(m.at("grid"), ctx + ".grid");
        std::vector<double> values = get_double_array(m.at("values"), ctx + ".values");
        if (grid.size() != values.size())
            throw DomainError("model file: " + ctx + " grid and values must have equal length");
        TabulatedFunction fn(std::move(grid), std::move(values), DomainKind::Time,
                             Monotonicity::Decreasing);
        double horizon = fn.back_x();
        return MarginalSurvival([fn](double t) { return fn(t); }, nullptr, horizon);
    }
    throw DomainError("model file: " + ctx + ".kind must be one of exponential, power_ratio, "
                      "tabulated; got " + in_quotes(kind));
}

// values must be `rows` parallel arrays over `grid`.
std::vector<std::vector<double>> parse_curve_rows(const json& v, std::size_t rows,
                                                  std::size_t grid_n, const std::string& ctx) {
    if (!v.is_array() || v.size() != rows)
        throw DomainError("model file: " + ctx + " must be an array of " + std::to_string(rows) +
                          " curves (one per member)");
    std::vector<std::vector<double>> out;
    out.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<double> row = get_double_array(v.at(i), ctx + "[" + std::to_string(i) + "]");
        if (row.size() != grid_n)
            throw DomainError("model file: " + ctx + "[" + std::to_string(i) + "] has " +
                              std::to_string(row.size()) + " values but the grid has " +
                              std::to_string(grid_n) + " points");
        out.push_back(std::move(row));
    }
    return out;
}

OdThlsSpec parse_odthls(const json& top, int r) {
    expect_keys(top, "odthls model", {"type", "r", "rates"}, {});
    const json& rates = member(top, "odthls model", "rates");
    if (!rates.is_object())
        throw DomainError("model file: rates must be an object keyed by failure prefixes");
    OdThlsSpec::RateTable table;
    for (const auto& item : rates.items()) {
        std::vector<int> prefix = parse_labels(item.key(), r, "rates");
        table[prefix] =
            parse_successor_rates(item.value(), r, "rates[" + in_quotes(item.key()) + "]");
    }
    return OdThlsSpec(r, std::move(table));
}

OdThlsSpec parse_thls(const json& top, int r) {
    expect_keys(top, "thls model", {"type", "r", "rates"}, {});
    const json& rates = member(top, "thls model", "rates");
    if (!rates.is_object())
        throw DomainError("model file: rates must be an object keyed by failed sets");
    std::map<std::vector<int>, std::map<int, double>> by_set;
    for (const auto& item : rates.items()) {
        std::vector<int> set = parse_labels(item.key(), r, "rates");
        for (std::size_t i = 0; i + 1 < set.size(); ++i)
            if (set[i] >= set[i + 1])
                throw DomainError("model file: thls rates are keyed by failed sets, written in "
                                  "increasing order; key " + in_quotes(item.key()) +
                                  " is not (use the odthls type for order-dependent rates)");
        by_set[set] = parse_successor_rates(item.value(), r, "rates[" + in_quotes(item.key()) + "]");
    }
    // Every proper subset must have an entry before the expansion to ordered
    // prefixes, so missing data is reported in the file's own terms.
    for (int k = 0; k < r; ++k) {
        for (const auto& idx : subsets_of_size(r, k)) {
            std::vector<int> set(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) set[i] = idx[i] + 1;
            if (!by_set.count(set))
                throw DomainError("model file: thls rates are missing the failed set \"" +
                                  join_labels(set) + "\"");
        }
    }
    OdThlsSpec::RateTable table;
    for (const auto& [set, succ] : by_set)
        for (const auto& perm : permutations_of(set)) table[perm] = succ;
    return OdThlsSpec(r, std::move(table));
}

LoadedModel parse_archimedean(const json& top, int r) {
    LoadedModel m;
    std::string family = get_string(top, "archimedean model", "family");
    if (family == "power_ratio") {
        expect_keys(top, "archimedean model", {"type", "r", "family", "alpha", "beta"},
                    {"marginal"});
        PowerRatioParams p;
        p.alpha = get_positive(top, "archimedean model", "alpha");
        p.beta = get_double(top, "archimedean model", "beta");
        if (!(p.beta >= 1.0) || !std::isfinite(p.beta))
            throw DomainError("model file: archimedean model.beta must be >= 1, got " +
                              std::to_string(p.beta));
        m.generator = power_ratio_generator(p);
    } else if (family == "log") {
        expect_keys(top, "archimedean model", {"type", "r", "family"}, {"marginal"});
        m.generator = log_generator();
    } else if (family == "tabulated_delta") {
        expect_keys(top, "archimedean model", {"type", "r", "family", "grid", "values"},
                    {"marginal"});
        std::vector<double> grid = get_double_array(top.at("grid"), "archimedean model.grid");
        std::vector<double> values = get_double_array(top.at("values"), "archimedean model.values");
        if (grid.size() != values.size())
            throw DomainError("model file: archimedean model grid and values must have equal "
                              "length");
        TabulatedFunction fn(std::move(grid), std::move(values), DomainKind::UnitInterval,
                             Monotonicity::Increasing);
        RecoveredGenerator rec = recover_generator([fn](double u) { return fn(u); }, r);
        if (!rec.converged)
            throw ContractError(
                "model file: generator recovery from the tabulated diagonal did not converge "
                "after " + std::to_string(rec.iterations) + " refinements");
        for (const auto& n : rec.notes) m.notes.push_back(n);
        m.generator = std::move(rec.gen);
    } else {
        throw DomainError("model file: archimedean model.family must be one of power_ratio, log, "
                          "tabulated_delta; got " + in_quotes(family));
    }
    m.diagonals = arch_diagonal_family(*m.generator, r);
    if (top.contains("marginal")) m.marginal = parse_marginal(top.at("marginal"), "marginal");
    return m;
}

LoadedModel parse_schur(const json& top, int r) {
    LoadedModel m;
    std::string family = get_string(top, "schur_constant model", "family");
    if (family == "power_ratio") {
        expect_keys(top, "schur_constant model", {"type", "r", "family", "alpha", "beta"}, {});
        json marg = {{"kind", "power_ratio"},
                     {"alpha", member(top, "schur_constant model", "alpha")},
                     {"beta", member(top, "schur_constant model", "beta")}};
        m.marginal = parse_marginal(marg, "schur_constant model");
    } else if (family == "exponential") {
        expect_keys(top, "schur_constant model", {"type", "r", "family", "rate"}, {});
        json marg = {{"kind", "exponential"}, {"rate", member(top, "schur_constant model", "rate")}};
        m.marginal = parse_marginal(marg, "schur_constant model");
    } else if (family == "tabulated") {
        expect_keys(top, "schur_constant model", {"type", "r", "family", "grid", "values"}, {});
        json marg = {{"kind", "tabulated"},
                     {"grid", member(top, "schur_constant model", "grid")},
                     {"values", member(top, "schur_constant model", "values")}};
        m.marginal = parse_marginal(marg, "schur_constant model");
    } else {
        throw DomainError("model file: schur_constant model.family must be one of power_ratio, "
                          "exponential, tabulated; got " + in_quotes(family));
    }
    m.diagonals = schur_diagonal_family(*m.marginal, r);
    return m;
}

LoadedModel parse_orderstats(const json& top, int r) {
    expect_keys(top, "orderstats model", {"type", "r", "grid", "values"}, {});
    std::vector<double> grid = get_double_array(top.at("grid"), "orderstats model.grid");
    auto rows = parse_curve_rows(member(top, "orderstats model", "values"),
                                 static_cast<std::size_t>(r), grid.size(),
                                 "orderstats model.values");
    std::vector<RealFn> fns;
    fns.reserve(rows.size());
    double horizon = grid.back();
    for (auto& row : rows) {
        TabulatedFunction fn(grid, std::move(row), DomainKind::Time, Monotonicity::Decreasing);
        fns.push_back([fn](double t) { return fn(t); });
    }
    LoadedModel m;
    m.orderstats = OrderStatFamily(r, std::move(fns), {}, horizon);
    m.marginal = marginal_from_orderstats(*m.orderstats);
    return m;
}

LoadedModel parse_diagonals(const json& top, int r) {
    expect_keys(top, "diagonals model", {"type", "r", "grid", "values"}, {"marginal"});
    std::vector<double> grid = get_double_array(top.at("grid"), "diagonals model.grid");
    if (grid.front() != 0.0 || grid.back() != 1.0)
        throw DomainError("model file: diagonals model.grid must span [0, 1] exactly");
    auto rows = parse_curve_rows(member(top, "diagonals model", "values"),
                                 static_cast<std::size_t>(r - 1), grid.size(),
                                 "diagonals model.values");
    std::vector<RealFn> fns;
    fns.reserve(rows.size());
    for (auto& row : rows) {
        TabulatedFunction fn(grid, std::move(row), DomainKind::UnitInterval,
                             Monotonicity::Increasing);
        fns.push_back([fn](double u) { return fn(u); });
    }
    LoadedModel m;
    m.diagonals = DiagonalFamily(r, std::move(fns));
    if (top.contains("marginal")) m.marginal = parse_marginal(top.at("marginal"), "marginal");
    return m;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

OdThlsSpec LoadedModel::rate_table() const {
    if (odthls) return *odthls;
    if (exthls) return exthls->as_odthls();
    throw ContractError("model of type '" + type + "' has no failure-rate table; only odthls, "
                        "thls, and exchangeable_thls models do");
}

LoadedModel load_model_json(const std::string& text) {
    json top;
    try {
        top = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("model file: invalid JSON: ") + e.what());
    }
    if (!top.is_object())
        throw DomainError("model file: top level must be an object with \"type\" and \"r\"");
    std::string type = get_string(top, "model", "type");
    int r = get_int(top, "model", "r");
    check_dimension(r);

    LoadedModel m;
    if (type == "odthls") {
        m.odthls = parse_odthls(top, r);
    } else if (type == "thls") {
        m.odthls = parse_thls(top, r);
    } else if (type == "exchangeable_thls") {
        expect_keys(top, "exchangeable_thls model", {"type", "r", "L"}, {});
        std::vector<double> L =
            get_double_array(member(top, "exchangeable_thls model", "L"), "L");
        if (L.size() != static_cast<std::size_t>(r))
            throw DomainError("model file: L has " + std::to_string(L.size()) +
                              " stage rates but r = " + std::to_string(r));
        m.exthls = ExThlsModel(std::move(L));
        m.marginal = m.exthls->marginal_family();
        m.orderstats = m.exthls->orderstat_family();
        m.diagonals = m.exthls->diagonal_family();
    } else if (type == "archimedean") {
        m = parse_archimedean(top, r);
    } else if (type == "schur_constant") {
        m = parse_schur(top, r);
    } else if (type == "orderstats") {
        m = parse_orderstats(top, r);
    } else if (type == "diagonals") {
        m = parse_diagonals(top, r);
    } else {
        throw DomainError("model file: unknown type " + in_quotes(type) +
                          " (one of odthls, thls, exchangeable_thls, archimedean, "
                          "schur_constant, orderstats, diagonals)");
    }
    m.type = type;
    m.r = r;
    return m;
}

LoadedModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("model file: cannot open " + in_quotes(path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_model_json(buf.str());
}

std::string odthls_to_json(const OdThlsSpec& spec) {
    json rates = json::object();
    for (const auto& [prefix, succ] : spec.rates()) {
        json row = json::object();
        for (const auto& [j, lam] : succ) row[std::to_string(j)] = lam;
        rates[join_labels(prefix)] = std::move(row);
    }
    json top = {{"type", "odthls"}, {"r", spec.r()}, {"rates", std::move(rates)}};
    return top.dump(2) + "\n";
}

std::string exthls_to_json(const ExThlsModel& model) {
    json top = {{"type", "exchangeable_thls"}, {"r", model.r()}, {"L", model.L()}};
    return top.dump(2) + "\n";
}

std::string canonical_model_fingerprint(const std::string& text) {
    json top;
    try {
        top = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("model file: invalid JSON: ") + e.what());
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(top.dump())));
    return std::string("fnv1a:") + buf;
}

} // namespace lifeline
