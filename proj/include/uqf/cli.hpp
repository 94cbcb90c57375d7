#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "uqf/bounds.hpp"
#include "uqf/indec.hpp"
#include "uqf/zeta.hpp"

namespace uqf::cli {

using json = nlohmann::ordered_json;

/// Bad flag values found after parsing; reported like CLI11 parse errors (exit 2).
class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what), flag_(flag) {}
    const std::string& flag() const { return flag_; }

private:
    std::string flag_;
};

struct Config {
    unsigned workers = 0;
    double tol = 1e-6;
    double abs_err = 1e-9;
    mpfr_prec_t precision = kDefaultPrecision;
    std::optional<std::string> coeffs;
};

inline unsigned parse_workers(const std::string& text, const std::string& origin) {
    try {
        std::size_t pos = 0;
        const long n = std::stol(text, &pos);
        if (pos == text.size() && n >= 1 && n <= 1024) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    throw UsageError(origin, "worker count must be an integer in 1..1024, got '" + text + "'");
}

inline double parse_positive_double(const std::string& text, const std::string& origin) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos == text.size() && v > 0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(origin, "expected a positive number, got '" + text + "'");
}

/// key=value lines, '#' comments. Keys: workers, tol, abs_err, precision, coeffs.
inline void apply_config_file(const std::string& path, Config& cfg) {
    std::ifstream in(path);
    if (!in) throw UsageError("--config", "cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw UsageError("--config", "line '" + trim(line) + "' is not key=value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const std::string origin = "--config " + key;
        if (key == "workers") {
            cfg.workers = parse_workers(value, origin);
        } else if (key == "tol") {
            cfg.tol = parse_positive_double(value, origin);
        } else if (key == "abs_err") {
            cfg.abs_err = parse_positive_double(value, origin);
        } else if (key == "precision") {
            const double p = parse_positive_double(value, origin);
            if (p < 64 || p > kMaxPrecision) throw UsageError(origin, "precision must lie in 64.." + std::to_string(kMaxPrecision));
            cfg.precision = static_cast<mpfr_prec_t>(p);
        } else if (key == "coeffs") {
            cfg.coeffs = value;
        } else {
            throw UsageError("--config", "unknown key '" + key + "'");
        }
    }
}

/// Applies fn to every item on up to `workers` threads; results keep input order.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, F fn, unsigned workers) {
    using R = decltype(fn(items.front()));
    std::vector<std::optional<R>> slots(items.size());
    std::vector<std::exception_ptr> errors(items.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < items.size();) {
            try {
                slots[i].emplace(fn(items[i]));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min<std::size_t>(workers, items.size()));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    std::vector<R> out;
    out.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

// ---- serialization ----

inline json to_json(const Rational& q) { return q.get_str(); }

inline json to_json(const Integer& n) {
    if (n.fits_slong_p()) return n.get_si();
    return n.get_str();
}

inline json to_json(const Interval& v) { return {{"lo", v.lo_string()}, {"hi", v.hi_string()}}; }

inline json to_json(const FieldElement& a) {
    const auto [s, t] = a.omega_coords();
    return {{"value", a.to_string()},
            {"omega_coords", {s.get_str(), t.get_str()}},
            {"norm", norm(a).get_str()},
            {"trace", trace(a).get_str()}};
}

inline json to_json(const FracIdeal& I) {
    return {{"value", I.to_string()}, {"scale", I.scale().get_str()}, {"a", to_json(I.a())},
            {"b", to_json(I.b())}, {"norm", I.norm().get_str()}};
}

inline json to_json(const IndecClass& c) {
    return {{"representative", to_json(c.representative)},
            {"canonical", to_json(c.canonical)},
            {"source", c.source.to_string()}};
}

inline json classes_json(const std::vector<IndecClass>& v) {
    json arr = json::array();
    for (const auto& c : v) arr.push_back(to_json(c));
    return arr;
}

inline std::string sci(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << std::scientific << x;
    return os.str();
}

// ---- verbs ----

inline SiegelData select_data(unsigned d, const Config& cfg) {
    if (cfg.coeffs) return load_siegel_data(*cfg.coeffs, d);
    if (d == 2) return derived_siegel_data();
    fail(ErrorKind::MissingCoefficient, "no coefficients for d = " + std::to_string(d) + "; pass --coeffs FILE");
}

inline json field_json(const QuadraticField& K) {
    const auto u = fundamental_unit(K);
    const auto dc = different_codifferent(K);
    const auto tp = codifferent_tp_principal(K);
    return {{"D", K.D()},
            {"disc", K.disc()},
            {"omega", to_json(K.omega())},
            {"fundamental_unit", to_json(u.eps)},
            {"norm_eps", u.norm_sign},
            {"eps_plus", to_json(u.eps_plus)},
            {"class_number", class_reps(K).size()},
            {"narrow_class_number", narrow_class_reps(K).size()},
            {"different", to_json(dc.different)},
            {"codifferent", to_json(dc.codifferent)},
            {"codifferent_tp_generator", tp ? to_json(*tp) : json(nullptr)}};
}

inline json cfrac_json(const QuadraticField& K) {
    const CFExpansion& e = xi_expansion(K);
    const auto u = fundamental_unit(K);
    return {{"D", K.D()},
            {"subject", e.subject.to_string()},
            {"u0", e.u0()},
            {"period", e.period},
            {"s", e.s()},
            {"eps", to_json(u.eps)},
            {"norm_eps", u.norm_sign},
            {"eps_plus", to_json(u.eps_plus)}};
}

inline json indec_json(const QuadraticField& K, const std::optional<FracIdeal>& ideal) {
    const auto u = fundamental_unit(K);
    json out{{"D", K.D()}, {"eps_plus", to_json(u.eps_plus)}, {"orbit_window", "1 <= x/x' < eps_plus^2"}};
    if (!ideal) {
        const auto ring = indecomposables_ring(K);
        const auto pm = indecomposables_pm(K);
        out["ring"] = {{"count", ring.size()}, {"classes", classes_json(ring)}};
        out["plus_minus"] = {{"count", pm.size()}, {"classes", classes_json(pm)}};
        return out;
    }
    const FracIdeal& I = *ideal;
    const auto cls = i_indecomposables(I);
    const Integer c = integral_rescale(I);
    const FracIdeal J = I.scaled(Rational(c));
    out["ideal"] = to_json(I);
    out["rescale"] = to_json(c);
    out["norm_bound"] = indecomposable_norm_bound(J).get_str();
    out["count"] = cls.size();
    out["classes"] = classes_json(cls);
    const auto tpg = tp_generator(I);
    json kappa{{"kappa_one", tpg.has_value()}, {"classcount", cls.size()}};
    if (tpg) kappa["tp_generator"] = to_json(*tpg);
    if (positive_generator(I)) kappa["cf"] = kappa_upper_cf(I);
    out["kappa"] = kappa;
    return out;
}

inline json kappa_json(const QuadraticField& K) {
    const KappaBound kb = kappa_field_bound(K);
    json classes = json::array();
    for (const auto& pc : kb.classes)
        classes.push_back({{"ideal", to_json(pc.ideal)},
                           {"kappa_one", pc.kappa_one},
                           {"cf", pc.cf ? json(*pc.cf) : json(nullptr)},
                           {"classcount", pc.classcount},
                           {"upper", pc.upper}});
    return {{"D", K.D()}, {"lower", kb.lower}, {"upper", kb.upper}, {"narrow_classes", classes}};
}

inline json zeta_json(const QuadraticField& K, const Config& cfg) {
    const SiegelData data = select_data(2, cfg);
    const ZetaReport r = zeta_report(K, cfg.tol, cfg.abs_err, data);
    json s = json::array();
    for (const auto& [l, v] : r.s_values) s.push_back({{"level", l}, {"value", to_json(v)}});
    return {{"D", r.D},
            {"disc", r.disc},
            {"s_values", s},
            {"zeta_minus1", to_json(r.zeta_minus1)},
            {"oracle_minus1", to_json(r.oracle_minus1)},
            {"agree", r.zeta_minus1 == r.oracle_minus1},
            {"zeta2", to_json(r.zeta2)},
            {"functional_equation",
             {{"residual", r.fe_residual}, {"bound", r.fe_bound}, {"tol", r.tol}, {"pass", r.fe_pass}}},
            {"provenance", to_string(r.provenance)}};
}

inline json threshold_json(unsigned d, unsigned long R, const SiegelData& data, mpfr_prec_t prec) {
    const ThresholdCertificate t = disc_threshold(d, R, data, prec);
    return {{"R", R},
            {"disc0", t.disc0.get_str()},
            {"monotone_from", t.monotone_from.get_str()},
            {"cap", t.cap.get_str()},
            {"rhs_at_next", to_json(t.rhs_at_next)},
            {"minimal", t.minimal},
            {"R_min_at_next", min_rank_bound(t.disc0 + 1, d, data)}};
}

inline json rankbound_json(unsigned d, const std::optional<Integer>& disc, std::optional<unsigned long> threshold,
                           const Config& cfg) {
    const SiegelData data = select_data(d, cfg);
    json out{{"d", d}, {"r", r_d(d)}, {"provenance", to_string(data.provenance)}};
    if (disc) {
        const BoundReport b = bound_report(*disc, d, data);
        out["disc"] = b.disc.get_str();
        out["G"] = to_json(b.G);
        out["B"] = to_json(b.B);
        out["rhs"] = to_json(b.rhs);
        out["R_min"] = b.R_min;
        out["cap_at_R_min"] = cap_C(b.R_min * d, b.r).get_str();
        out["notes"] = b.notes;
    }
    if (threshold) out["threshold"] = threshold_json(d, *threshold, data, cfg.precision);
    return out;
}

inline bool is_fundamental_disc(std::int64_t disc) {
    if (disc % 4 == 1) return disc > 1 && is_squarefree(disc);
    if (disc % 4 != 0) return false;
    const std::int64_t m = disc / 4;
    return (m % 4 == 2 || m % 4 == 3) && is_squarefree(m);
}

inline std::int64_t radicand(std::int64_t disc) { return disc % 4 == 1 ? disc : disc / 4; }

inline json lift_json(unsigned d, const Config& cfg) {
    const SiegelData data = select_data(d, cfg);
    const Interval bound = lifting_disc_bound(d, data, cfg.precision);
    json out{{"d", d}, {"provenance", to_string(data.provenance)}, {"disc_bound", to_json(bound)}};
    if (d != 2) return out;
    json adm = json::array();
    const auto top = static_cast<std::int64_t>(bound.upper()) + 1;
    for (std::int64_t disc = 5; disc <= top; ++disc) {
        if (!is_fundamental_disc(disc) || !bound.certainly_greater(Rational(disc))) continue;
        const QuadraticField K(radicand(disc));
        const long t = min_codifferent_trace(K);
        adm.push_back({{"disc", disc},
                       {"D", K.D()},
                       {"min_codifferent_trace", t},
                       {"r_d", r_d(2)},
                       {"trace_condition", t <= static_cast<long>(r_d(2))},
                       {"codifferent_principal", is_principal(different_codifferent(K).codifferent)}});
    }
    out["admissible"] = adm;
    return out;
}

struct ScanRow {
    std::int64_t D, disc;
    std::size_t h_plus;
    int norm_eps;
    Integer s1;
    Rational zeta_minus1;
    Interval rhs;
    unsigned long R_min;
};

inline std::vector<ScanRow> scan_rows(std::int64_t lo, std::int64_t hi, const Config& cfg, unsigned workers) {
    const SiegelData data = select_data(2, cfg);
    std::vector<std::int64_t> discs;
    for (std::int64_t disc = std::max<std::int64_t>(lo, 5); disc <= hi; ++disc)
        if (is_fundamental_disc(disc)) discs.push_back(disc);
    return parallel_map(
        discs,
        [&](std::int64_t disc) {
            const QuadraticField K(radicand(disc));
            return ScanRow{K.D(),
                           disc,
                           narrow_class_reps(K).size(),
                           fundamental_unit(K).norm_sign,
                           s_ell(K, 1),
                           zeta_minus1_siegel(K, data),
                           main_rhs(Integer(disc), 2, data, cfg.precision),
                           min_rank_bound(Integer(disc), 2, data)};
        },
        workers);
}

inline void write_scan(const std::vector<ScanRow>& rows, const std::string& format, std::ostream& out) {
    if (format == "csv") {
        out << "D,disc,h_plus,norm_eps,s1,zeta_minus1,rhs,R_min\n";
        for (const auto& r : rows)
            out << r.D << ',' << r.disc << ',' << r.h_plus << ',' << r.norm_eps << ',' << r.s1.get_str() << ','
                << r.zeta_minus1.get_str() << ',' << sci(r.rhs.mid()) << ',' << r.R_min << '\n';
        return;
    }
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"D", r.D},
                       {"disc", r.disc},
                       {"h_plus", r.h_plus},
                       {"norm_eps", r.norm_eps},
                       {"s1", to_json(r.s1)},
                       {"zeta_minus1", to_json(r.zeta_minus1)},
                       {"rhs", to_json(r.rhs)},
                       {"R_min", r.R_min}});
    out << json{{"rows", arr}}.dump(2) << '\n';
}

// ---- verify ----

struct SuiteResult {
    std::string name;
    std::string status;  // pass, fail, skipped
    std::size_t checked = 0;
    json counterexample;
    std::string note;
    double seconds = 0;
};

inline json to_json(const SuiteResult& s) {
    json j{{"name", s.name}, {"status", s.status}, {"checked", s.checked}, {"seconds", s.seconds}};
    if (!s.counterexample.is_null()) j["counterexample"] = s.counterexample;
    if (!s.note.empty()) j["note"] = s.note;
    return j;
}

inline std::vector<std::int64_t> squarefree_range(std::int64_t hi) {
    std::vector<std::int64_t> out;
    for (std::int64_t D = 2; D <= hi; ++D)
        if (is_squarefree(D)) out.push_back(D);
    return out;
}

/// First non-null payload in input order decides the suite.
inline SuiteResult finish(std::string name, const std::vector<json>& payloads) {
    SuiteResult r{std::move(name), "pass", payloads.size(), nullptr, "", 0};
    for (const auto& p : payloads)
        if (!p.is_null()) {
            r.status = "fail";
            r.counterexample = p;
            break;
        }
    return r;
}

inline SuiteResult suite_siegel(std::int64_t maxD, const SiegelData& data, unsigned workers) {
    const auto Ds = squarefree_range(maxD);
    auto res = finish("siegel_vs_oracle", parallel_map(Ds, [&](std::int64_t D) -> json {
        const QuadraticField K(D);
        const Rational s = zeta_minus1_siegel(K, data), o = zeta_minus1_oracle(K);
        if (s == o && sgn(s) > 0) return nullptr;
        return {{"D", D}, {"siegel", to_json(s)}, {"oracle", to_json(o)}};
    }, workers));
    res.note = "D <= " + std::to_string(maxD) + ", b_1 = " + data.coeffs.front().get_str() + " (" +
               to_string(data.provenance) + ")";
    return res;
}

inline SuiteResult suite_b1() {
    const auto sample = default_b1_sample();
    SuiteResult r{"b1_derivation", "pass", sample.size(), nullptr, "", 0};
    try {
        r.note = "b_1 = " + derive_b1(sample).get_str();
    } catch (const Error& e) {
        r.status = "fail";
        r.counterexample = {{"error", to_string(e.kind())}, {"message", e.what()}};
    }
    return r;
}

inline SuiteResult suite_indec(std::int64_t maxD, unsigned workers) {
    auto canon = [](const std::vector<IndecClass>& v) {
        std::set<FieldElement> s;
        for (const auto& c : v) s.insert(c.canonical);
        return s;
    };
    auto diff = [](const std::set<FieldElement>& a, const std::set<FieldElement>& b) {
        json arr = json::array();
        for (const auto& x : a)
            if (!b.count(x)) arr.push_back(x.to_string());
        return arr;
    };
    const auto Ds = squarefree_range(maxD);
    auto res = finish("indec_cf_vs_brute", parallel_map(Ds, [&](std::int64_t D) -> json {
        const QuadraticField K(D);
        const auto ring_cf = canon(indecomposables_ring(K)), ring_bf = canon(i_indecomposables(unit_ideal(K)));
        if (ring_cf != ring_bf)
            return {{"D", D}, {"kind", "ring"}, {"cf_only", diff(ring_cf, ring_bf)}, {"brute_only", diff(ring_bf, ring_cf)}};
        const auto pm_cf = canon(indecomposables_pm(K)), pm_bf = canon(pm_indecomposables_brute(K));
        if (pm_cf != pm_bf)
            return {{"D", D}, {"kind", "plus_minus"}, {"cf_only", diff(pm_cf, pm_bf)}, {"brute_only", diff(pm_bf, pm_cf)}};
        return nullptr;
    }, workers));
    res.note = "D <= " + std::to_string(maxD);
    return res;
}

inline SuiteResult suite_functional_eq(std::int64_t max_disc, const SiegelData& data, const Config& cfg,
                                       unsigned workers) {
    std::vector<std::int64_t> Ds;
    for (std::int64_t D : squarefree_range(max_disc))
        if (QuadraticField(D).disc() <= max_disc) Ds.push_back(D);
    auto res = finish("functional_equation", parallel_map(Ds, [&](std::int64_t D) -> json {
        const auto fe = functional_eq_check(QuadraticField(D), cfg.tol, cfg.abs_err, data);
        if (fe.pass) return nullptr;
        return {{"D", D}, {"residual", fe.residual}, {"bound", fe.bound}, {"tol", cfg.tol}};
    }, workers));
    res.note = "disc <= " + std::to_string(max_disc) + ", tol " + sci(cfg.tol);
    return res;
}

/// Random positive definite Gram of rank 1..6; half of them are non-classical (G = M/2, M even diagonal).
inline IntGram random_gram(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> rank_d(1, 6), entry(-2, 2), coin(0, 1);
    for (;;) {
        const std::size_t n = static_cast<std::size_t>(rank_d(rng));
        std::vector<std::vector<long>> a(n, std::vector<long>(n));
        for (auto& row : a)
            for (auto& x : row) x = entry(rng);
        std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                long s = 0;
                for (std::size_t k = 0; k < n; ++k) s += a[k][i] * a[k][j];
                m[i][j] = s;
            }
        const bool half = coin(rng) == 1;
        if (half) {
            for (std::size_t i = 0; i < n; ++i)
                if (m[i][i].get_num() % 2 != 0) m[i][i] += 1;
            for (auto& row : m)
                for (auto& x : row) x /= 2;
        }
        try {
            return IntGram(std::move(m));
        } catch (const Error&) {
        }
    }
}

inline SuiteResult suite_short_vectors(std::size_t count, unsigned workers) {
    std::mt19937_64 rng(20240601);
    std::vector<std::pair<IntGram, unsigned long>> cases;
    std::uniform_int_distribution<unsigned long> bound(1, 3);
    while (cases.size() < count) {
        IntGram g = random_gram(rng);
        cases.emplace_back(std::move(g), bound(rng));
    }
    auto res = finish("short_vector_cap", parallel_map(cases, [](const std::pair<IntGram, unsigned long>& c) -> json {
        const Integer n = count_short_vectors(c.first, Integer(c.second)), cap = short_vector_cap(c.first, c.second);
        if (n <= cap) return nullptr;
        json rows = json::array();
        for (const auto& row : c.first.rows()) {
            json r = json::array();
            for (const auto& x : row) r.push_back(x.get_str());
            rows.push_back(r);
        }
        return {{"gram", rows}, {"i", c.second}, {"count", n.get_str()}, {"cap", cap.get_str()}};
    }, workers));
    res.note = std::to_string(count) + " random Grams, rank <= 6, i <= 3";
    return res;
}

inline SuiteResult suite_divisor_domination(std::int64_t maxD, unsigned workers) {
    const auto Ds = squarefree_range(maxD);
    auto res = finish("divisor_domination", parallel_map(Ds, [](std::int64_t D) -> json {
        const QuadraticField K(D);
        if (!codifferent_tp_principal(K)) return nullptr;
        const FracIdeal diff = different_codifferent(K).different;
        for (long l = 1; l <= static_cast<long>(r_d(2)); ++l) {
            const Interval g = g_bound(static_cast<unsigned long>(l), 2, Integer(K.disc()));
            for (const auto& gamma : trace_level_codifferent(K, l)) {
                const Integer s = sigma_ideal(principal_ideal(gamma) * diff);
                if (g.certainly_less(Rational(s)))
                    return {{"D", D}, {"level", l}, {"gamma", gamma.to_string()}, {"sigma", s.get_str()}, {"g", to_json(g)}};
            }
        }
        return nullptr;
    }, workers));
    res.note = "D <= " + std::to_string(maxD) + ", levels l <= r_2, codifferent with a totally positive generator";
    return res;
}

/// Degrees listed in a coefficient file.
inline std::set<unsigned> coefficient_degrees(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
    std::set<unsigned> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string ds;
        if (!(ls >> ds)) continue;
        try {
            out.insert(static_cast<unsigned>(std::stoul(ds)));
        } catch (const std::exception&) {
            fail(ErrorKind::ParseError, "bad degree '" + ds + "' in " + path);
        }
    }
    return out;
}

/// With external coefficients for d > 2: threshold certificate and lifting bound per degree.
inline SuiteResult suite_higher_degree(const std::optional<std::string>& coeffs) {
    SuiteResult r{"higher_degree_bounds", "skipped", 0, nullptr, "", 0};
    if (!coeffs) {
        r.note = "no external coefficient file";
        return r;
    }
    std::vector<unsigned> degrees;
    for (unsigned d : coefficient_degrees(*coeffs))
        if (d > 2) degrees.push_back(d);
    if (degrees.empty()) {
        r.note = "coefficient file has no d > 2 entries";
        return r;
    }
    r.status = "pass";
    for (unsigned d : degrees) {
        try {
            const SiegelData data = load_siegel_data(*coeffs, d);
            const ThresholdCertificate t = disc_threshold(d, 1, data);
            ++r.checked;
            const unsigned long next = min_rank_bound(t.disc0 + 1, d, data);
            if (next < 2 || t.rhs_at_next.certainly_less(Rational(t.cap))) {
                r.status = "fail";
                r.counterexample = {{"d", d}, {"disc0", t.disc0.get_str()}, {"R_min_at_next", next}};
                break;
            }
            if (d <= 43) lifting_disc_bound(d, data);
        } catch (const Error& e) {
            r.status = "fail";
            r.counterexample = {{"d", d}, {"error", to_string(e.kind())}, {"message", e.what()}};
            break;
        }
    }
    r.note = "degrees checked: " + std::to_string(r.checked);
    return r;
}

struct VerifyOptions {
    bool full = false;
    std::optional<Rational> inject_b1;
};

inline json verify_json(const VerifyOptions& opt, const Config& cfg, unsigned workers, bool& all_pass) {
    SiegelData data = derived_siegel_data();
    if (cfg.coeffs && coefficient_degrees(*cfg.coeffs).count(2)) data = load_siegel_data(*cfg.coeffs, 2);
    if (opt.inject_b1) data = SiegelData{2, {*opt.inject_b1}, Provenance::External};

    std::vector<std::function<SuiteResult()>> suites{
        [&] { return suite_siegel(opt.full ? 500 : 100, data, workers); },
        [&] { return suite_b1(); },
        [&] { return suite_indec(opt.full ? 60 : 30, workers); },
        [&] { return suite_functional_eq(200, data, cfg, workers); },
        [&] { return suite_short_vectors(opt.full ? 1000 : 200, workers); },
        [&] { return suite_divisor_domination(opt.full ? 200 : 100, workers); },
        [&] { return suite_higher_degree(cfg.coeffs); },
    };
    json arr = json::array();
    all_pass = true;
    for (const auto& run_suite : suites) {
        const auto t0 = std::chrono::steady_clock::now();
        SuiteResult r = run_suite();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.status == "fail") all_pass = false;
        arr.push_back(to_json(r));
    }
    return {{"scope", opt.full ? "full" : "quick"}, {"workers", workers}, {"pass", all_pass}, {"suites", arr}};
}

// ---- entry point ----

inline std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw UsageError("--disc-range", "expected A..B, got '" + text + "'");
    try {
        std::size_t p1 = 0, p2 = 0;
        const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
        const long long lo = std::stoll(a, &p1), hi = std::stoll(b, &p2);
        if (p1 == a.size() && p2 == b.size() && lo >= 1 && lo <= hi) return {lo, hi};
    } catch (const std::exception&) {
    }
    throw UsageError("--disc-range", "expected positive integers A..B with A <= B, got '" + text + "'");
}

inline Integer parse_positive_integer(const std::string& text, const std::string& flag) {
    Integer n;
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos || n.set_str(text, 10) != 0 || n < 1)
        throw UsageError(flag, "expected a positive integer, got '" + text + "'");
    return n;
}

inline json usage_json(const std::string& message) { return {{"error", "UsageError"}, {"message", message}}; }

/// Runs one command; args exclude the program name. Exit 0 ok, 1 domain error, 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Real quadratic fields: indecomposables, zeta values and rank bounds for universal forms", "uqf"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string workers_flag;
    app.add_option("--config", config_path, "key=value file (workers, tol, abs_err, precision, coeffs)");
    app.add_option("--workers", workers_flag, "worker threads for scan and verify (overrides UQF_WORKERS)");

    std::int64_t D = 0;
    auto* field = app.add_subcommand("field", "field invariants");
    field->add_option("D", D, "squarefree D > 1")->required();
    auto* cfrac = app.add_subcommand("cfrac", "continued fraction of xi and the fundamental unit");
    cfrac->add_option("D", D)->required();
    std::string ideal_text;
    auto* indec = app.add_subcommand("indec", "indecomposables of O_K, or of an ideal");
    indec->add_option("D", D)->required();
    indec->add_option("--ideal", ideal_text, "a,b,scale: the ideal scale*(a, b+omega)");
    auto* kappa = app.add_subcommand("kappa", "bounds on kappa(K)");
    kappa->add_option("D", D)->required();

    std::string tol_text, abs_err_text, coeffs_path;
    auto* zeta = app.add_subcommand("zeta", "zeta_K(-1) by Siegel's formula and the L-function oracle");
    zeta->add_option("D", D)->required();
    zeta->add_option("--tol", tol_text, "functional-equation tolerance");
    zeta->add_option("--abs-err", abs_err_text, "absolute error for zeta_K(2)");

    unsigned d = 2;
    std::string disc_text;
    unsigned long threshold_rank = 0;
    auto* rankbound = app.add_subcommand("rankbound", "lower bound on the rank of universal forms");
    rankbound->add_option("--d", d, "degree")->check(CLI::Range(1u, 1000u));
    rankbound->add_option("--disc", disc_text, "discriminant");
    auto* thr = rankbound->add_option("--threshold", threshold_rank, "certify disc0 for rank R")->check(CLI::PositiveNumber);

    auto* lift = app.add_subcommand("lift", "discriminant bound for lifting sums of squares");
    lift->add_option("--d", d, "degree")->check(CLI::Range(1u, 1000u));

    std::string range_text, format = "json";
    auto* scan = app.add_subcommand("scan", "table over a discriminant range");
    scan->add_option("--d", d, "degree (2)")->check(CLI::Range(1u, 1000u));
    scan->add_option("--disc-range", range_text, "A..B")->required();
    scan->add_option("--out", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::string scope, inject_text;
    auto* verify = app.add_subcommand("verify", "cross-oracle verification suites");
    verify->add_option("scope", scope, "quick or full")->required()->check(CLI::IsMember({"quick", "full"}));
    verify->add_option("--inject-b1", inject_text, "override b_1(4) to exercise failure reporting");

    for (auto* sub : {zeta, rankbound, lift, scan, verify})
        sub->add_option("--coeffs", coeffs_path, "external coefficient file 'd l p/q'");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << usage_json(e.what()).dump() << '\n';
        return 2;
    }

    try {
        Config cfg;
        if (!config_path.empty()) apply_config_file(config_path, cfg);
        if (const char* env = std::getenv("UQF_WORKERS"); env && *env) cfg.workers = parse_workers(env, "UQF_WORKERS");
        if (!workers_flag.empty()) cfg.workers = parse_workers(workers_flag, "--workers");
        if (!tol_text.empty()) cfg.tol = parse_positive_double(tol_text, "--tol");
        if (!abs_err_text.empty()) cfg.abs_err = parse_positive_double(abs_err_text, "--abs-err");
        if (!coeffs_path.empty()) cfg.coeffs = coeffs_path;
        const unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());

        std::optional<FracIdeal> ideal;
        std::vector<std::string> parts;
        if (!ideal_text.empty()) {
            std::stringstream ss(ideal_text);
            for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
            if (parts.size() != 3) throw UsageError("--ideal", "expected a,b,scale, got '" + ideal_text + "'");
        }
        std::optional<Integer> disc;
        if (!disc_text.empty()) disc = parse_positive_integer(disc_text, "--disc");
        std::optional<Rational> inject;
        if (!inject_text.empty()) {
            Rational q;
            if (q.set_str(inject_text, 10) != 0) throw UsageError("--inject-b1", "not a rational: '" + inject_text + "'");
            q.canonicalize();
            if (q.get_den() == 0) throw UsageError("--inject-b1", "zero denominator");
            inject = q;
        }
        std::pair<std::int64_t, std::int64_t> range;
        if (scan->parsed()) range = parse_range(range_text);
        if (rankbound->parsed() && !disc && thr->count() == 0)
            throw UsageError("--disc", "rankbound needs --disc or --threshold");

        // domain computations
        try {
            auto emit = [&](const json& j) { out << j.dump(2) << '\n'; };
            if (field->parsed()) {
                emit(field_json(QuadraticField(D)));
            } else if (cfrac->parsed()) {
                emit(cfrac_json(QuadraticField(D)));
            } else if (indec->parsed()) {
                const QuadraticField K(D);
                if (!parts.empty())
                    ideal = FracIdeal::from_normal_form(K, parse_rational(parts[2]), parse_rational(parts[0]).get_num(),
                                                        parse_rational(parts[1]).get_num());
                emit(indec_json(K, ideal));
            } else if (kappa->parsed()) {
                emit(kappa_json(QuadraticField(D)));
            } else if (zeta->parsed()) {
                emit(zeta_json(QuadraticField(D), cfg));
            } else if (rankbound->parsed()) {
                std::optional<unsigned long> t;
                if (thr->count() > 0) t = threshold_rank;
                emit(rankbound_json(d, disc, t, cfg));
            } else if (lift->parsed()) {
                emit(lift_json(d, cfg));
            } else if (scan->parsed()) {
                if (d != 2) fail(ErrorKind::DegreeUnsupported, "scan runs over real quadratic fields (d = 2)");
                write_scan(scan_rows(range.first, range.second, cfg, workers), format, out);
            } else if (verify->parsed()) {
                bool pass = false;
                emit(verify_json({scope == "full", inject}, cfg, workers, pass));
                return pass ? 0 : 1;
            }
            return 0;
        } catch (const Error& e) {
            out << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump(2) << '\n';
            return 1;
        }
    } catch (const UsageError& e) {
        err << json{{"error", "UsageError"}, {"flag", e.flag()}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const Error& e) {
        // config-time domain errors, e.g. an unreadable coefficient file
        out << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump(2) << '\n';
        return 1;
    }
}

}  // namespace uqf::cli
