#include "spinmag/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "spinmag/constants.hpp"
#include "spinmag/errors.hpp"
#include "spinmag/quadratic.hpp"

namespace spinmag::scenarios {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

enum class KeyKind { freq, time, dimless, integer, text };

struct KeyInfo {
    const char* name;
    KeyKind kind;
    const char* def;   // empty string = unset
};

// Registry of configuration keys. Frequencies, couplings and rates are
// ordinary Hz in config files and converted to rad/s internally; times are
// seconds.
constexpr KeyInfo kRegistry[] = {
    // raw physical parameters
    {"omega_a", KeyKind::freq, "2e9"},
    {"omega_c", KeyKind::freq, "2e9"},
    {"omega_b", KeyKind::freq, "1e9"},
    {"omega_q", KeyKind::freq, "2e9"},
    {"omega_m", KeyKind::freq, "2e9"},
    {"omega_a_d", KeyKind::freq, "2e9"},
    {"omega_c_d", KeyKind::freq, "2e9"},
    {"F_a", KeyKind::freq, "0"},
    {"F_c", KeyKind::freq, "0"},
    {"g_a", KeyKind::freq, "0"},
    {"g_c", KeyKind::freq, "0"},
    {"g_q", KeyKind::freq, "20e3"},
    {"g_m", KeyKind::freq, "20e3"},
    {"kappa_a", KeyKind::freq, "1e6"},
    {"kappa_b", KeyKind::freq, "1e5"},
    {"kappa_c", KeyKind::freq, "1e6"},
    {"kappa_m", KeyKind::freq, "1e6"},
    {"gamma_q", KeyKind::freq, "1e3"},
    {"K", KeyKind::freq, "0"},
    // cascade overrides
    {"delta_a_prime", KeyKind::freq, "-1e3"},
    {"delta_c_prime", KeyKind::freq, "-1e3"},
    {"G_a", KeyKind::freq, "1e8"},
    {"G_c", KeyKind::freq, "1e8"},
    {"delta_q", KeyKind::freq, ""},
    {"delta_m", KeyKind::freq, ""},
    {"delta_q_over_Gq", KeyKind::dimless, "10"},
    {"delta_m_over_Gm", KeyKind::dimless, "10"},
    {"Wc_over_OmegaA", KeyKind::dimless, "1e6"},
    {"G_frac_of_Gcp", KeyKind::dimless, ""},
    {"N_A", KeyKind::dimless, "0"},
    // regime thresholds
    {"ratio_wb", KeyKind::dimless, "10"},
    {"ratio_chi", KeyKind::dimless, "100"},
    {"ratio_gr", KeyKind::dimless, "10"},
    {"zeta_max", KeyKind::dimless, "0.2"},
    // spaces and grids
    {"cutoff_a", KeyKind::integer, "5"},
    {"cutoff_b", KeyKind::integer, "5"},
    {"cutoff_c", KeyKind::integer, "5"},
    {"cutoff_m", KeyKind::integer, "2"},
    {"cutoff_A", KeyKind::integer, "3"},
    {"cutoff_C", KeyKind::integer, "3"},
    {"n_out", KeyKind::integer, "801"},
    {"n_points", KeyKind::integer, "201"},
    {"t_end", KeyKind::time, ""},
    // scenario knobs
    {"fig2_window_rad", KeyKind::dimless, "0.2"},
    {"convergence_check", KeyKind::integer, "0"},
    {"Wa_over_Wc", KeyKind::dimless, "1"},
    {"g_over_w_min", KeyKind::dimless, "0"},
    {"g_over_w_max", KeyKind::dimless, "1"},
    {"omega_ratio_min", KeyKind::dimless, "1e-6"},
    {"omega_ratio_max", KeyKind::dimless, "1"},
    {"fig4_r_values", KeyKind::text, "1,2,3"},
    {"fig5_periods", KeyKind::dimless, "3"},
    {"lbp_occupancy_max", KeyKind::dimless, "0.05"},
    {"wk_min", KeyKind::dimless, "0.1"},
    {"wk_max", KeyKind::dimless, "10"},
};

constexpr int kRegistrySize = static_cast<int>(sizeof(kRegistry) / sizeof(kRegistry[0]));

int registry_index(const std::string& key) {
    for (int i = 0; i < kRegistrySize; ++i) {
        if (key == kRegistry[i].name) return i;
    }
    return -1;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    const std::string t = trim(value);
    if (t.empty()) throw ConfigError("configuration key not set: " + key);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
    return v;
}

} // namespace

int ScenarioConfig::index_of(const std::string& key) const {
    const int i = registry_index(key);
    if (i < 0) throw ConfigError("unknown configuration key: " + key);
    return i;
}

ScenarioConfig ScenarioConfig::defaults() {
    ScenarioConfig cfg;
    cfg.values_.reserve(kRegistrySize);
    for (const auto& k : kRegistry) cfg.values_.emplace_back(k.name, k.def);
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    ScenarioConfig cfg = defaults();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        try {
            cfg.apply_line(line);
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

void ScenarioConfig::apply_line(const std::string& raw) {
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value': " + raw);
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

void ScenarioConfig::set(const std::string& key, const std::string& value) {
    values_[static_cast<size_t>(index_of(key))].second = trim(value);
}

bool ScenarioConfig::is_set(const std::string& key) const {
    return !values_[static_cast<size_t>(index_of(key))].second.empty();
}

double ScenarioConfig::angular(const std::string& key) const {
    const int i = index_of(key);
    if (kRegistry[i].kind != KeyKind::freq) {
        throw ConfigError("key is not a frequency: " + key);
    }
    return spinmag::angular(parse_number(key, values_[static_cast<size_t>(i)].second));
}

std::optional<double> ScenarioConfig::angular_opt(const std::string& key) const {
    if (!is_set(key)) return std::nullopt;
    return angular(key);
}

double ScenarioConfig::number(const std::string& key) const {
    return parse_number(key, values_[static_cast<size_t>(index_of(key))].second);
}

std::optional<double> ScenarioConfig::number_opt(const std::string& key) const {
    if (!is_set(key)) return std::nullopt;
    return number(key);
}

double ScenarioConfig::seconds(const std::string& key) const {
    return parse_number(key, values_[static_cast<size_t>(index_of(key))].second);
}

int ScenarioConfig::integer(const std::string& key) const {
    const double v = number(key);
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || std::abs(r) > 1e9) {
        throw ConfigError("expected an integer for " + key);
    }
    return static_cast<int>(r);
}

std::string ScenarioConfig::text(const std::string& key) const {
    return values_[static_cast<size_t>(index_of(key))].second;
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::resolved() const {
    return values_;
}

// ------------------------------- cascade glue --------------------------------

DeriveResult resolve_cascade(const ScenarioConfig& cfg) {
    params::PhysicalParams p;
    p.omega_a = cfg.angular("omega_a");
    p.omega_c = cfg.angular("omega_c");
    p.omega_b = cfg.angular("omega_b");
    p.omega_q = cfg.angular("omega_q");
    p.omega_m = cfg.angular("omega_m");
    p.omega_a_d = cfg.angular("omega_a_d");
    p.omega_c_d = cfg.angular("omega_c_d");
    p.F_a = cfg.angular("F_a");
    p.F_c = cfg.angular("F_c");
    p.g_a = cfg.angular("g_a");
    p.g_c = cfg.angular("g_c");
    p.g_q = cfg.angular("g_q");
    p.g_m = cfg.angular("g_m");
    p.kappa_a = cfg.angular("kappa_a");
    p.kappa_b = cfg.angular("kappa_b");
    p.kappa_c = cfg.angular("kappa_c");
    p.kappa_m = cfg.angular("kappa_m");
    p.gamma_q = cfg.angular("gamma_q");
    p.K = cfg.angular("K");

    params::CascadeOptions opts;
    opts.Delta_a_p = cfg.angular_opt("delta_a_prime");
    opts.Delta_c_p = cfg.angular_opt("delta_c_prime");
    opts.G_a = cfg.angular_opt("G_a");
    opts.G_c = cfg.angular_opt("G_c");
    opts.Delta_q = cfg.angular_opt("delta_q");
    opts.Delta_m = cfg.angular_opt("delta_m");
    opts.Delta_q_over_Gq = cfg.number_opt("delta_q_over_Gq");
    opts.Delta_m_over_Gm = cfg.number_opt("delta_m_over_Gm");
    opts.G_frac_of_Gcp = cfg.number_opt("G_frac_of_Gcp");
    opts.Wc_over_OmegaA = cfg.number("Wc_over_OmegaA");
    opts.N_A = cfg.number("N_A");
    opts.thresholds.ratio_wb = cfg.number("ratio_wb");
    opts.thresholds.ratio_chi = cfg.number("ratio_chi");
    opts.thresholds.ratio_gr = cfg.number("ratio_gr");
    opts.thresholds.zeta_max = cfg.number("zeta_max");

    const params::CascadeResult res = params::derive_cascade(p, opts);
    return {res.derived, res.regime};
}

namespace {

std::vector<std::pair<std::string, std::string>> base_metadata(const ScenarioConfig& cfg,
                                                               const std::string& command) {
    std::vector<std::pair<std::string, std::string>> md;
    md.emplace_back("command", command);
    for (const auto& [k, v] : cfg.resolved()) md.emplace_back(k, v.empty() ? "(unset)" : v);
    return md;
}

std::vector<std::pair<std::string, double>> derived_rows(const params::DerivedParams& d) {
    return {
        {"Delta_a", d.Delta_a},       {"Delta_c", d.Delta_c},
        {"Delta_q", d.Delta_q},       {"Delta_m", d.Delta_m},
        {"mean_a_re", d.mean_a.real()}, {"mean_a_im", d.mean_a.imag()},
        {"mean_c_re", d.mean_c.real()}, {"mean_c_im", d.mean_c.imag()},
        {"mean_b_re", d.mean_b.real()}, {"mean_b_im", d.mean_b.imag()},
        {"Delta_a_prime", d.Delta_a_p}, {"Delta_c_prime", d.Delta_c_p},
        {"G_a", d.G_a},               {"G_c", d.G_c},
        {"xi_a_plus", d.xi_a_p},      {"xi_a_minus", d.xi_a_m},
        {"xi_c_plus", d.xi_c_p},      {"xi_c_minus", d.xi_c_m},
        {"G_ac", d.G_ac},             {"chi_a", d.chi_a},
        {"chi_c", d.chi_c},           {"r_a", d.r_a},
        {"r_c", d.r_c},               {"W_a", d.W_a},
        {"W_c", d.W_c},               {"G_sq", d.G_sq},
        {"G_sq_eff", d.G_sq_eff},     {"theta", d.theta},
        {"Omega_A_sq", d.Omega_A_sq}, {"Omega_C_sq", d.Omega_C_sq},
        {"Omega_A", d.Omega_A},       {"Omega_C", d.Omega_C},
        {"G_cp", d.G_cp},             {"G_cp_prime", d.G_cp_prime},
        {"x_zpf", d.x_zpf},           {"Gq_cp", d.Gq_cp},
        {"Gm_cp", d.Gm_cp},           {"zeta_q", d.zeta_q},
        {"zeta_m", d.zeta_m},         {"G_eff", d.G_eff},
        {"Delta_q_eff", d.Delta_q_eff}, {"Delta_m_eff", d.Delta_m_eff},
        {"stark_shift", d.stark_shift}, {"N_A", d.N_A},
    };
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir.string());
}

} // namespace

void write_csv(const SweepSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (const auto& [key, value] : series.metadata) {
        out << "# " << key << " = " << value << '\n';
    }
    out << "x";
    for (const auto& col : series.columns) out << ',' << col.name;
    out << '\n';
    for (size_t k = 0; k < series.x.size(); ++k) {
        out << fmt17(series.x[k]);
        for (const auto& col : series.columns) {
            out << ',';
            if (col.is_text) {
                out << col.txt[k];
            } else {
                out << fmt17(col.num[k]);
            }
        }
        out << '\n';
    }
}

// --------------------------------- derive ------------------------------------

DeriveResult cmd_derive(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    DeriveResult res = resolve_cascade(cfg);
    const auto rows = derived_rows(res.d);

    std::printf("%-16s %s\n", "quantity", "value");
    for (const auto& [name, value] : rows) {
        std::printf("%-16s %.10g\n", name.c_str(), value);
    }
    std::printf("\n%-26s %14s %14s %10s %s\n", "condition", "left", "right", "margin",
                "status");
    for (const auto& c : res.regime.conditions) {
        std::printf("%-26s %14.6g %14.6g %10.4g %s\n", c.name.c_str(), c.left, c.right,
                    c.margin, c.pass ? "pass" : "FAIL");
    }
    const bool strong = res.d.G_eff > res.d.phys.kappa_m;
    std::printf("\nG_eff = %.6g rad/s vs kappa_m = %.6g rad/s -> %s\n", res.d.G_eff,
                res.d.phys.kappa_m, strong ? "strong coupling (G_eff > kappa_m)"
                                           : "NOT strong (G_eff <= kappa_m)");

    {
        std::ofstream out(out_dir / "derived.csv");
        if (!out) throw std::runtime_error("cmd_derive: cannot write derived.csv");
        for (const auto& [k, v] : base_metadata(cfg, "derive")) {
            out << "# " << k << " = " << v << '\n';
        }
        out << "quantity,value\n";
        for (const auto& [name, value] : rows) out << name << ',' << fmt17(value) << '\n';
        out << "strong_coupling," << (strong ? 1 : 0) << '\n';
    }
    {
        std::ofstream out(out_dir / "regime.csv");
        if (!out) throw std::runtime_error("cmd_derive: cannot write regime.csv");
        for (const auto& [k, v] : base_metadata(cfg, "derive")) {
            out << "# " << k << " = " << v << '\n';
        }
        out << "condition,left,right,margin,pass\n";
        for (const auto& c : res.regime.conditions) {
            out << '"' << c.name << "\"," << fmt17(c.left) << ',' << fmt17(c.right) << ','
                << fmt17(c.margin) << ',' << (c.pass ? 1 : 0) << '\n';
        }
    }
    return res;
}

// ---------------------------------- fig2 -------------------------------------

namespace {

struct Fig2Series {
    dynamics::TimeSeries hl, ht;
};

Fig2Series run_fig2_once(const ScenarioConfig& cfg, const params::DerivedParams& d,
                         double t_end, int scale) {
    using fock::SubsystemKind;
    const int ca = scale * cfg.integer("cutoff_a");
    const int cb = scale * cfg.integer("cutoff_b");
    const int cc = scale * cfg.integer("cutoff_c");
    const int cm = scale * cfg.integer("cutoff_m");

    const auto grid = dynamics::make_grid(t_end, cfg.integer("n_out"));

    const auto space_l = fock::make_space({{"q", SubsystemKind::two_level, 2},
                                           {"a", SubsystemKind::boson, ca},
                                           {"b", SubsystemKind::boson, cb},
                                           {"c", SubsystemKind::boson, cc},
                                           {"m", SubsystemKind::boson, cm}});
    const auto space_t = fock::make_space({{"q", SubsystemKind::two_level, 2},
                                           {"a", SubsystemKind::boson, ca},
                                           {"c", SubsystemKind::boson, cc},
                                           {"m", SubsystemKind::boson, cm}});

    Fig2Series out;
    {
        const auto H = fock::build_H_L(d, space_l);
        const auto psi0 = fock::basis_state(space_l, {{"a", 1}});
        dynamics::Observables obs{{"n_a", fock::number_op(space_l, "a")},
                                  {"n_c", fock::number_op(space_l, "c")}};
        out.hl = dynamics::evolve_state(H, psi0, grid, obs);
    }
    {
        const auto H = fock::build_H_T(d, space_t);
        const auto psi0 = fock::basis_state(space_t, {{"a", 1}});
        dynamics::Observables obs{{"n_a", fock::number_op(space_t, "a")},
                                  {"n_c", fock::number_op(space_t, "c")}};
        out.ht = dynamics::evolve_state(H, psi0, grid, obs);
    }
    return out;
}

} // namespace

Fig2Result cmd_fig2(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    const DeriveResult dr = resolve_cascade(cfg);
    const params::DerivedParams& d = dr.d;
    if (d.G_ac == 0.0 && !cfg.is_set("t_end")) {
        throw DomainError("fig2: zero cavity-cavity coupling, set t_end explicitly");
    }
    const double t_end = cfg.is_set("t_end")
                             ? cfg.seconds("t_end")
                             : cfg.number("fig2_window_rad") / std::abs(d.G_ac);

    Fig2Series base = run_fig2_once(cfg, d, t_end, 1);

    Fig2Result res;
    res.deviation = dynamics::compare_levels(base.hl, base.ht);
    res.hl = std::move(base.hl);
    res.ht = std::move(base.ht);

    auto md = base_metadata(cfg, "fig2");
    md.emplace_back("t_end", fmt17(t_end));
    md.emplace_back("initial_state", "one photon in cavity a");
    res.hl.metadata = md;
    res.hl.metadata.emplace_back("level", "full linearized (with mechanical mode)");
    res.ht.metadata = md;
    res.ht.metadata.emplace_back("level", "mechanically eliminated");
    dynamics::write_csv(res.hl, (out_dir / "fig2_HL.csv").string());
    dynamics::write_csv(res.ht, (out_dir / "fig2_HT.csv").string());

    std::printf("fig2: window %.6g s, max|n_a(HL) - n_a(HT)| = %.6g, "
                "max|n_c(HL) - n_c(HT)| = %.6g\n",
                t_end, res.deviation.max_abs("n_a"), res.deviation.max_abs("n_c"));

    if (cfg.integer("convergence_check") != 0) {
        const Fig2Series doubled = run_fig2_once(cfg, d, t_end, 2);
        const double delta =
            std::max(dynamics::compare_levels(res.hl, doubled.hl).overall_max(),
                     dynamics::compare_levels(res.ht, doubled.ht).overall_max());
        res.convergence_delta = delta;
        res.convergence_checked = true;
        std::printf("fig2: cutoff-doubling series change = %.6g\n", delta);
        if (delta > 1e-3) {
            throw NumericalError("fig2: convergence-check failure at the configured "
                                 "cutoffs (series change " + fmt17(delta) + ")");
        }
    }
    return res;
}

// ---------------------------------- fig3 -------------------------------------

SweepSeries cmd_fig3(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    const DeriveResult dr = resolve_cascade(cfg);
    const double W_c = dr.d.W_c;
    const double W_a = cfg.number("Wa_over_Wc") * W_c;
    const double K = dr.d.phys.K;

    const int n = cfg.integer("n_points");
    if (n < 2) throw ConfigError("fig3: n_points must be >= 2");
    const double lo = cfg.number("g_over_w_min");
    const double hi = cfg.number("g_over_w_max");
    if (!(hi > lo)) throw ConfigError("fig3: need g_over_w_max > g_over_w_min");

    SweepSeries s;
    s.x_name = "G_over_Wc";
    s.metadata = base_metadata(cfg, "fig3");
    s.metadata.emplace_back("W_a", fmt17(W_a));
    s.metadata.emplace_back("W_c", fmt17(W_c));
    s.columns = {{"Omega_A_sq", {}, {}, false},
                 {"Omega_C_sq", {}, {}, false},
                 {"stability", {}, {}, true}};
    for (int k = 0; k < n; ++k) {
        const double x = lo + (hi - lo) * k / (n - 1);
        const double G = x * W_c;
        const auto ps = quadratic::polariton_spectrum(W_a, W_c, G);
        s.x.push_back(x);
        s.columns[0].num.push_back(ps.Omega_A_sq);
        s.columns[1].num.push_back(ps.Omega_C_sq);
        s.columns[2].txt.push_back(
            quadratic::to_string(quadratic::stability_classify(W_a, W_c, G, K)));
    }
    write_csv(s, (out_dir / "fig3.csv").string());
    return s;
}

// ---------------------------------- fig4 -------------------------------------

SweepSeries cmd_fig4(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    const int n = cfg.integer("n_points");
    if (n < 2) throw ConfigError("fig4: n_points must be >= 2");
    const double lo = cfg.number("omega_ratio_min");
    const double hi = cfg.number("omega_ratio_max");
    if (!(lo > 0.0) || !(hi > lo)) {
        throw ConfigError("fig4: need 0 < omega_ratio_min < omega_ratio_max");
    }

    std::vector<double> r_values;
    {
        std::stringstream ss(cfg.text("fig4_r_values"));
        std::string item;
        while (std::getline(ss, item, ',')) {
            r_values.push_back(parse_number("fig4_r_values", item));
        }
        if (r_values.empty()) throw ConfigError("fig4: empty fig4_r_values");
    }

    SweepSeries s;
    s.x_name = "OmegaA_over_Wc";
    s.metadata = base_metadata(cfg, "fig4");
    for (const double r : r_values) {
        char name[32];
        std::snprintf(name, sizeof name, "ratio_r%g", r);
        s.columns.push_back({name, {}, {}, false});
    }
    for (int k = 0; k < n; ++k) {
        // log-spaced grid over (0, 1]
        const double x = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
        s.x.push_back(x);
        for (size_t j = 0; j < r_values.size(); ++j) {
            s.columns[j].num.push_back(0.5 * std::exp(r_values[j]) / std::sqrt(8.0 * x));
        }
    }
    write_csv(s, (out_dir / "fig4.csv").string());
    return s;
}

// ---------------------------------- fig5 -------------------------------------

Fig5Result cmd_fig5(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                    bool force) {
    ensure_dir(out_dir);
    const DeriveResult dr = resolve_cascade(cfg);
    const params::DerivedParams& d = dr.d;

    if (!dr.regime.all_required_pass()) {
        std::string names;
        for (const auto& n : dr.regime.failed_names()) names += " [" + n + "]";
        if (!force) {
            throw RegimeError("fig5: mandatory regime conditions failed:" + names +
                              " (use --force to run anyway)");
        }
        std::printf("fig5: WARNING, running with failed regime conditions:%s\n",
                    names.c_str());
    }
    if (!(d.G_eff > 0.0) || !std::isfinite(d.G_eff)) {
        throw DomainError("fig5: effective coupling not positive, nothing to exchange");
    }

    const double t_end = cfg.is_set("t_end")
                             ? cfg.seconds("t_end")
                             : cfg.number("fig5_periods") * std::numbers::pi / d.G_eff;
    const auto grid = dynamics::make_grid(t_end, cfg.integer("n_out"));

    using fock::SubsystemKind;
    const auto space_p = fock::make_space({{"q", SubsystemKind::two_level, 2},
                                           {"m", SubsystemKind::boson, cfg.integer("cutoff_m")},
                                           {"A", SubsystemKind::boson, cfg.integer("cutoff_A")}});
    const auto space_e = fock::make_space({{"q", SubsystemKind::two_level, 2},
                                           {"m", SubsystemKind::boson, cfg.integer("cutoff_m")}});

    const auto psi0_p = fock::basis_state(space_p, {{"q", 1}});
    const dynamics::Observables obs_p{{"sz_q", fock::pauli(space_p, "q", fock::Pauli::z)},
                                      {"n_m", fock::number_op(space_p, "m")},
                                      {"n_A", fock::number_op(space_p, "A")}};

    Fig5Result res;
    res.polariton = dynamics::evolve_state(fock::build_H_polariton(d, space_p), psi0_p, grid,
                                           obs_p);
    res.smp = dynamics::evolve_state(fock::build_H_eff_smp(d, space_p), psi0_p, grid, obs_p);

    dynamics::LindbladModel model;
    model.H = fock::build_H_eff(d, space_e);
    model.collapse = {{fock::ladder(space_e, "m"), d.phys.kappa_m},
                      {fock::pauli(space_e, "q", fock::Pauli::minus), d.phys.gamma_q}};
    const dynamics::Observables obs_e{{"sz_q", fock::pauli(space_e, "q", fock::Pauli::z)},
                                      {"n_m", fock::number_op(space_e, "m")}};
    res.lindblad = dynamics::evolve_density(model, fock::pure_density(
                                                       fock::basis_state(space_e, {{"q", 1}})),
                                            grid, obs_e);

    for (const double v : res.polariton.column("n_A")) {
        res.max_lbp_occupation = std::max(res.max_lbp_occupation, v);
    }
    const double lbp_max = cfg.number("lbp_occupancy_max");
    std::printf("fig5: window %.6g s, max LBP occupation %.4g (threshold %.4g)%s\n", t_end,
                res.max_lbp_occupation, lbp_max,
                res.max_lbp_occupation <= lbp_max ? "" : "  [EXCEEDED]");

    auto md = base_metadata(cfg, "fig5");
    md.emplace_back("t_end", fmt17(t_end));
    md.emplace_back("initial_state", "spin excited, magnon and polariton in vacuum");
    res.polariton.metadata = md;
    res.polariton.metadata.emplace_back("level", "near-critical polariton model");
    res.smp.metadata = md;
    res.smp.metadata.emplace_back("level", "effective spin-magnon-polariton model");
    res.lindblad.metadata = md;
    res.lindblad.metadata.emplace_back("level", "effective spin-magnon model with decay");
    dynamics::write_csv(res.polariton, (out_dir / "fig5_polariton.csv").string());
    dynamics::write_csv(res.smp, (out_dir / "fig5_smp.csv").string());
    dynamics::write_csv(res.lindblad, (out_dir / "fig5_lindblad.csv").string());

    const auto dev = dynamics::compare_levels(res.polariton, res.smp);
    std::printf("fig5: polariton vs effective max deviations: sz_q %.4g, n_m %.4g\n",
                dev.max_abs("sz_q"), dev.max_abs("n_m"));
    return res;
}

// ------------------------------- appendix-c ----------------------------------

SweepSeries cmd_appendix_c(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    const int n = cfg.integer("n_points");
    if (n < 2) throw ConfigError("appendix-c: n_points must be >= 2");
    const double lo = cfg.number("wk_min");
    const double hi = cfg.number("wk_max");
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("appendix-c: need 0 < wk_min < wk_max");

    SweepSeries s;
    s.x_name = "W_over_K";
    s.metadata = base_metadata(cfg, "appendix-c");
    s.metadata.emplace_back("branch_frequencies",
                            "Omega_A = -iK, Omega_C = +-sqrt(2) W - iK (ideal critical point)");
    s.columns = {{"a_plus", {}, {}, false},
                 {"c_plus_pos", {}, {}, false},
                 {"c_plus_neg", {}, {}, false}};
    const std::complex<double> I{0.0, 1.0};
    for (int k = 0; k < n; ++k) {
        const double x = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
        const double W = x;
        const double K = 1.0;   // scale-free in W/K
        const auto up = quadratic::decay_dressed_coeffs(W, K, -I * K,
                                                        std::sqrt(2.0) * W - I * K);
        const auto dn = quadratic::decay_dressed_coeffs(W, K, -I * K,
                                                        -std::sqrt(2.0) * W - I * K);
        s.x.push_back(x);
        s.columns[0].num.push_back(up.abs_a_plus);
        s.columns[1].num.push_back(up.abs_c_plus);
        s.columns[2].num.push_back(dn.abs_c_plus);
    }
    write_csv(s, (out_dir / "appendix_c.csv").string());
    return s;
}

// ---------------------------------- sweep ------------------------------------

SweepSeries cmd_sweep(const ScenarioConfig& cfg, const std::string& variable, double from,
                      double to, int points, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    const int reg = registry_index(variable);
    if (reg < 0) throw ConfigError("sweep: unknown variable: " + variable);
    if (kRegistry[reg].kind == KeyKind::text) {
        throw ConfigError("sweep: variable is not numeric: " + variable);
    }
    if (points < 1) throw ConfigError("sweep: points must be >= 1");
    if (points > 1 && from == to) throw ConfigError("sweep: empty range");

    SweepSeries s;
    s.x_name = variable;
    s.metadata = base_metadata(cfg, "sweep");
    s.metadata.emplace_back("sweep_variable", variable);
    s.x.resize(static_cast<size_t>(points));
    for (int k = 0; k < points; ++k) {
        s.x[static_cast<size_t>(k)] =
            points == 1 ? from : from + (to - from) * k / (points - 1);
    }

    const std::vector<std::string> num_names = {
        "chi_a", "chi_c", "r_a", "r_c", "W_a", "W_c", "G_ac", "G_sq", "G_sq_eff",
        "G_cp", "G_cp_prime", "Omega_A_sq", "x_zpf", "Gq_cp", "G_eff"};
    for (const auto& nme : num_names) s.columns.push_back({nme, {}, {}, false});
    s.columns.push_back({"stability", {}, {}, true});
    s.columns.push_back({"status", {}, {}, true});
    for (auto& col : s.columns) {
        if (col.is_text) {
            col.txt.assign(static_cast<size_t>(points), "");
        } else {
            col.num.assign(static_cast<size_t>(points),
                           std::numeric_limits<double>::quiet_NaN());
        }
    }

    // Cascade points are independent; shard them over a small worker pool.
    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (int k = next.fetch_add(1); k < points; k = next.fetch_add(1)) {
            const size_t i = static_cast<size_t>(k);
            ScenarioConfig local = cfg;
            local.set(variable, fmt17(s.x[i]));
            try {
                const DeriveResult r = resolve_cascade(local);
                const params::DerivedParams& d = r.d;
                const double vals[] = {d.chi_a, d.chi_c, d.r_a, d.r_c, d.W_a, d.W_c,
                                       d.G_ac, d.G_sq, d.G_sq_eff, d.G_cp, d.G_cp_prime,
                                       d.Omega_A_sq, d.x_zpf, d.Gq_cp, d.G_eff};
                for (size_t j = 0; j < num_names.size(); ++j) s.columns[j].num[i] = vals[j];
                s.columns[num_names.size()].txt[i] = quadratic::to_string(
                    quadratic::stability_classify(d.W_a, d.W_c, d.G_sq_eff, d.phys.K));
                s.columns[num_names.size() + 1].txt[i] = "ok";
            } catch (const std::exception& e) {
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                s.columns[num_names.size() + 1].txt[i] = msg;
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_workers = std::min<unsigned>(hw, static_cast<unsigned>(points));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    write_csv(s, (out_dir / "sweep.csv").string());
    return s;
}

} // namespace spinmag::scenarios

// ----------------------------------- CLI -------------------------------------

#include "CLI11.hpp"

namespace spinmag::scenarios {

namespace {

ScenarioConfig build_config(const std::string& config_path,
                            const std::vector<std::string>& sets) {
    ScenarioConfig cfg = config_path.empty() ? ScenarioConfig::defaults()
                                             : ScenarioConfig::from_file(config_path);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"spinmag: reduction cascade and dynamics of an optomechanical "
                 "spin-magnon interface"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> sets;
    bool force = false;
    std::string sweep_var;
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_points = 101;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file (key = value lines)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--set", sets, "override a configuration key (key=value)")
            ->take_all();
    };

    CLI::App* c_derive = app.add_subcommand("derive", "run the derivation cascade");
    CLI::App* c_fig2 = app.add_subcommand("fig2", "photon exchange, full vs eliminated");
    CLI::App* c_fig3 = app.add_subcommand("fig3", "polariton branches vs coupling");
    CLI::App* c_fig4 = app.add_subcommand("fig4", "coupling enhancement vs LBP frequency");
    CLI::App* c_fig5 = app.add_subcommand("fig5", "spin-magnon state exchange");
    CLI::App* c_appc = app.add_subcommand("appendix-c", "decay-dressed coefficients vs W/K");
    CLI::App* c_sweep = app.add_subcommand("sweep", "cascade over a swept key");
    for (CLI::App* c : {c_derive, c_fig2, c_fig3, c_fig4, c_fig5, c_appc, c_sweep}) {
        add_common(c);
    }
    c_fig5->add_flag("--force", force, "run even if mandatory regime conditions fail");
    c_sweep->add_option("--var", sweep_var, "configuration key to sweep")->required();
    c_sweep->add_option("--from", sweep_from, "range start")->required();
    c_sweep->add_option("--to", sweep_to, "range end")->required();
    c_sweep->add_option("--points", sweep_points, "number of sweep points");

    std::vector<const char*> argv;
    argv.push_back("spinmag");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const ScenarioConfig cfg = build_config(config_path, sets);
        if (c_derive->parsed()) {
            cmd_derive(cfg, out_dir);
        } else if (c_fig2->parsed()) {
            cmd_fig2(cfg, out_dir);
        } else if (c_fig3->parsed()) {
            cmd_fig3(cfg, out_dir);
        } else if (c_fig4->parsed()) {
            cmd_fig4(cfg, out_dir);
        } else if (c_fig5->parsed()) {
            cmd_fig5(cfg, out_dir, force);
        } else if (c_appc->parsed()) {
            cmd_appendix_c(cfg, out_dir);
        } else if (c_sweep->parsed()) {
            cmd_sweep(cfg, sweep_var, sweep_from, sweep_to, sweep_points, out_dir);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const RegimeError& e) {
        std::fprintf(stderr, "regime validation: %s\n", e.what());
        return 3;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}

} // namespace spinmag::scenarios
