#include "spdelab/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "spdelab/error.hpp"

namespace spdelab {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& msg)
{
    fail(ErrorCode::Config, (path.empty() ? std::string("/") : path) + ": " + msg);
}

// Re-run a type's own validation, reporting failures under `path`.
template <class F>
void checked(const std::string& path, F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        bad(path, e.what());
    }
}

class Section {
public:
    Section(const json& j, std::string path, std::initializer_list<const char*> keys)
        : j_(j), path_(std::move(path))
    {
        if (!j.is_object()) bad(path_, "expected an object");
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : j.items())
            if (!allowed.count(k)) bad(path_ + "/" + k, "unknown key");
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& at(const char* key) const { return j_.at(key); }
    std::string path(const char* key) const { return path_ + "/" + key; }
    const std::string& path() const { return path_; }

    double number(const char* key, double fallback) const
    {
        return has(key) ? number(key) : fallback;
    }
    double number(const char* key) const
    {
        if (!has(key)) bad(path(key), "required");
        const json& v = j_.at(key);
        if (!v.is_number()) bad(path(key), "expected a number");
        double x = v.get<double>();
        if (!std::isfinite(x)) bad(path(key), "must be finite");
        return x;
    }
    std::uint64_t count(const char* key, std::uint64_t fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            bad(path(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }
    std::string text(const char* key, const std::string& fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) bad(path(key), "expected a string");
        return v.get<std::string>();
    }
    bool flag(const char* key, bool fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) bad(path(key), "expected true or false");
        return v.get<bool>();
    }

private:
    const json& j_;
    std::string path_;
};

const json& empty_object()
{
    static const json e = json::object();
    return e;
}

const json& sub(const json& doc, const char* key)
{
    return doc.contains(key) ? doc.at(key) : empty_object();
}

Profile parse_profile(const json& j, const std::string& path, double fallback, double length)
{
    if (j.is_null()) return Profile::constant(fallback);
    if (j.is_number()) return Profile::constant(j.get<double>());
    Section s(j, path, {"kind", "value", "amplitude", "mode", "base", "slope"});
    std::string kind = s.text("kind", "constant");
    if (kind == "constant") return Profile::constant(s.number("value", fallback));
    if (kind == "zero") return Profile::constant(0.0);
    if (kind == "affine") {
        double base = s.number("base");
        double slope = s.number("slope", 0.0);
        std::ostringstream d;
        d.precision(17);
        d << base << " + " << slope << "*y";
        return Profile{d.str(), [base, slope](double y) { return base + slope * y; }};
    }
    if (kind == "sine") {
        auto mode = s.count("mode", 1);
        if (mode < 1) bad(s.path("mode"), "must be >= 1");
        return Profile::sine(s.number("amplitude", 1.0), static_cast<int>(mode), length);
    }
    bad(s.path("kind"), "expected constant, zero, affine or sine");
}

void parse_model(RunConfig& cfg, const json& doc)
{
    const json& j = sub(doc, "model");
    Section s(j, "/model", {"l", "alpha", "nu", "theta", "theta_field", "reaction", "sigma", "T", "x0", "modes"});
    ModelSpec& m = cfg.model;
    m.dom.length = s.number("l", 1.0);
    m.dom.alpha = s.number("alpha", 2.0);
    m.nu = s.number("nu", 0.01);
    m.horizon = s.number("T", 1.0);
    if (!(m.dom.length > 0.0)) bad(s.path("l"), "domain length must be positive");
    if (!(m.dom.alpha > 1.0 && m.dom.alpha <= 2.0)) bad(s.path("alpha"), "fractional order alpha must lie in (1, 2]");
    if (!(m.nu >= 0.0)) bad(s.path("nu"), "diffusivity nu must be >= 0");
    if (!(m.horizon > 0.0)) bad(s.path("T"), "horizon T must be > 0");

    if (s.has("theta") && s.has("theta_field")) bad(s.path("theta_field"), "give either theta or theta_field");
    if (s.has("theta_field")) {
        Section f(s.at("theta_field"), s.path("theta_field"), {"base", "slope_y", "slope_t"});
        m.theta = ReactionIntensity::affine(f.number("base"), f.number("slope_y", 0.0), f.number("slope_t", 0.0));
    } else {
        m.theta = s.number("theta", 0.0);
    }

    try {
        m.reaction = Reaction::by_name(s.text("reaction", "f1"));
    } catch (const Error& e) {
        bad(s.path("reaction"), e.what());
    }

    m.sigma = parse_profile(s.has("sigma") ? s.at("sigma") : json(), s.path("sigma"), 1.0, m.dom.length);
    m.x0 = parse_profile(s.has("x0") ? s.at("x0") : json(), s.path("x0"), 0.0, m.dom.length);

    m.dom.modes = static_cast<std::size_t>(s.count("modes", 0));
    if (s.has("modes") && m.dom.modes < 1) bad(s.path("modes"), "spectral truncation K must be at least 1");
}

void parse_grid(RunConfig& cfg, const json& doc)
{
    Section s(sub(doc, "grid"), "/grid", {"M", "N"});
    cfg.grid.M = static_cast<std::size_t>(s.count("M", 256));
    cfg.grid.N = static_cast<std::size_t>(s.count("N", 65536));
    if (cfg.grid.M < 2) bad(s.path("M"), "grid needs M >= 2 spatial subintervals");
    if (cfg.grid.N < 1) bad(s.path("N"), "grid needs N >= 1 time steps");
    cfg.grid.length = cfg.model.dom.length;
    cfg.grid.horizon = cfg.model.horizon;
    if (cfg.model.dom.modes == 0) cfg.model.dom.modes = cfg.grid.M - 1;
    if (cfg.model.dom.modes > cfg.grid.M - 1) bad("/model/modes", "spectral truncation K must not exceed M - 1");
}

Window parse_window(const json& j, const std::string& path, double length, double horizon)
{
    Section s(j, path, {"y0", "t0", "delta_y", "delta_t"});
    Window w;
    w.y0 = s.number("y0", 0.5 * length);
    w.t0 = s.number("t0", 0.5 * horizon);
    w.delta_y = s.number("delta_y", 1.0);
    w.delta_t = s.number("delta_t", std::min(w.t0, horizon - w.t0));
    if (!(w.y0 >= 0.0 && w.y0 <= length)) bad(s.path("y0"), "must lie in [0, l]");
    if (!(w.t0 > 0.0 && w.t0 < horizon)) bad(s.path("t0"), "must lie in (0, T)");
    if (!(w.delta_y > 0.0 && w.delta_y <= 1.0)) bad(s.path("delta_y"), "must lie in (0, 1]");
    if (!(w.delta_t > 0.0 && w.delta_t <= std::min(w.t0, horizon - w.t0) * (1.0 + 1e-12)))
        bad(s.path("delta_t"), "need 0 < delta_t <= min(t0, T - t0)");
    return w;
}

void parse_nonparam(RunConfig& cfg, const json& j, const std::string& path)
{
    Section s(j, path, {"eta_y", "eta_t", "points", "bandwidths"});
    NonparamSpec& np = cfg.nonparam;
    np.eta_y = s.number("eta_y", 1.0);
    np.eta_t = s.number("eta_t", 1.0);
    if (!(np.eta_y > 0.0 && np.eta_y <= 1.0)) bad(s.path("eta_y"), "must lie in (0, 1]");
    if (!(np.eta_t > 0.0 && np.eta_t <= 1.0)) bad(s.path("eta_t"), "must lie in (0, 1]");
    np.points.clear();
    if (s.has("points")) {
        const json& pts = s.at("points");
        if (!pts.is_array() || pts.empty()) bad(s.path("points"), "expected a non-empty array");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            std::string p = s.path("points") + "/" + std::to_string(i);
            EvalPoint e;
            if (pts[i].is_array()) {
                if (pts[i].size() != 2 || !pts[i][0].is_number() || !pts[i][1].is_number())
                    bad(p, "expected [y0, t0]");
                e.y0 = pts[i][0].get<double>();
                e.t0 = pts[i][1].get<double>();
            } else {
                Section q(pts[i], p, {"y0", "t0"});
                e.y0 = q.number("y0");
                e.t0 = q.number("t0");
            }
            if (!(e.y0 >= 0.0 && e.y0 <= cfg.model.dom.length)) bad(p, "y0 must lie in [0, l]");
            if (!(e.t0 > 0.0 && e.t0 < cfg.model.horizon)) bad(p, "t0 must lie in (0, T)");
            np.points.push_back(e);
        }
    } else {
        np.points.push_back(EvalPoint{0.5 * cfg.model.dom.length, 0.5 * cfg.model.horizon});
    }
    np.bandwidths.reset();
    if (s.has("bandwidths")) {
        const json& b = s.at("bandwidths");
        if (b.is_string()) {
            if (b.get<std::string>() != "optimal") bad(s.path("bandwidths"), "expected \"optimal\" or an object");
        } else {
            Section q(b, s.path("bandwidths"), {"delta_y", "delta_t"});
            Bandwidths bw;
            bw.delta_y = q.number("delta_y");
            bw.delta_t = q.number("delta_t");
            if (!(bw.delta_y > 0.0)) bad(q.path("delta_y"), "must be > 0");
            if (!(bw.delta_t > 0.0)) bad(q.path("delta_t"), "must be > 0");
            bw.eta_eff = effective_smoothness(np.eta_y, np.eta_t);
            np.bandwidths = bw;
        }
    }
}

void parse_estimator(RunConfig& cfg, const json& doc)
{
    Section s(sub(doc, "estimator"), "/estimator",
              {"kind", "window", "nonparam", "alpha_bar", "forward_policy", "spectral_modes"});
    EstimatorSelection& e = cfg.estimator;
    try {
        e.kind = estimator_kind_from_name(s.text("kind", "global"));
    } catch (const Error& err) {
        bad(s.path("kind"), err.what());
    }
    try {
        e.forward = forward_policy_from_name(s.text("forward_policy", "implicit-euler"));
    } catch (const Error& err) {
        bad(s.path("forward_policy"), err.what());
    }
    cfg.alpha_bar = s.number("alpha_bar", 0.05);
    if (!(cfg.alpha_bar > 0.0 && cfg.alpha_bar < 1.0)) bad(s.path("alpha_bar"), "must lie in (0, 1)");

    double l = cfg.model.dom.length;
    double T = cfg.model.horizon;
    e.window = s.has("window") ? parse_window(s.at("window"), s.path("window"), l, T) : Window::full(l, T);

    parse_nonparam(cfg, s.has("nonparam") ? s.at("nonparam") : empty_object(), s.path("nonparam"));
    cfg.nonparam.alpha_bar = cfg.alpha_bar;
    e.point = cfg.nonparam.points.front();
    e.eta_y = cfg.nonparam.eta_y;
    e.eta_t = cfg.nonparam.eta_t;
    e.bandwidths = cfg.nonparam.bandwidths;

    if (s.has("spectral_modes")) {
        const json& k = s.at("spectral_modes");
        if (k.is_string() && k.get<std::string>() == "auto") {
            e.spectral_modes.reset();
        } else {
            auto K = s.count("spectral_modes", 0);
            if (K < 1 || K > cfg.model.dom.modes) bad(s.path("spectral_modes"), "must lie in [1, K]");
            e.spectral_modes = static_cast<std::size_t>(K);
        }
    }
}

void parse_mc(RunConfig& cfg, const json& doc)
{
    Section s(sub(doc, "mc"), "/mc",
              {"nus", "runs", "base_seed", "paired_seeds", "threads", "max_blowup_fraction", "rate_max_nu"});
    McSection& mc = cfg.mc;
    mc.nus.clear();
    if (s.has("nus")) {
        const json& a = s.at("nus");
        if (!a.is_array()) bad(s.path("nus"), "expected an array of numbers");
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::string p = s.path("nus") + "/" + std::to_string(i);
            if (!a[i].is_number()) bad(p, "expected a number");
            double nu = a[i].get<double>();
            if (!(std::isfinite(nu) && nu > 0.0)) bad(p, "every nu must be > 0");
            for (double prev : mc.nus)
                if (prev == nu) bad(p, "nu values must be distinct");
            mc.nus.push_back(nu);
        }
    }
    mc.runs = static_cast<std::size_t>(s.count("runs", 100));
    if (s.has("runs") && mc.runs < 2) bad(s.path("runs"), "need at least 2 runs per nu");
    mc.base_seed = s.count("base_seed", 1);
    mc.paired_seeds = s.flag("paired_seeds", false);
    mc.threads = static_cast<std::size_t>(s.count("threads", 0));
    mc.max_blowup_fraction = s.number("max_blowup_fraction", 0.1);
    if (!(mc.max_blowup_fraction >= 0.0 && mc.max_blowup_fraction <= 1.0))
        bad(s.path("max_blowup_fraction"), "must lie in [0, 1]");
    if (s.has("rate_max_nu")) {
        mc.rate_max_nu = s.number("rate_max_nu");
        if (!(*mc.rate_max_nu > 0.0)) bad(s.path("rate_max_nu"), "must be > 0");
    }
}

void parse_mesh_policy(RunConfig& cfg, const json& doc)
{
    if (!doc.contains("mesh_policy")) return;
    Section s(doc.at("mesh_policy"), "/mesh_policy", {"beta", "gamma_t", "gamma_y", "p_y", "tilde_gamma_y"});
    MeshPolicy p;
    p.beta = s.number("beta", cfg.model.dom.alpha);
    p.gamma_t = s.number("gamma_t", p.gamma_t);
    p.gamma_y = s.number("gamma_y", p.gamma_y);
    p.p_y = s.number("p_y", p.p_y);
    p.tilde_gamma_y = s.number("tilde_gamma_y", p.beta * p.gamma_y);
    double cap = 0.5 * (1.0 - 1.0 / p.beta);
    if (!(p.beta > 1.0)) bad(s.path("beta"), "must be > 1");
    if (!(p.gamma_t > 0.0 && p.gamma_t < cap)) bad(s.path("gamma_t"), "need 0 < gamma_t < (1 - 1/beta)/2");
    if (!(p.p_y > 0.0)) bad(s.path("p_y"), "must be > 0");
    if (!(p.gamma_y > 0.0 && p.gamma_y < cap - 1.0 / p.p_y))
        bad(s.path("gamma_y"), "need 0 < gamma_y < (1 - 1/beta)/2 - 1/p_y");
    if (!(p.tilde_gamma_y > 0.0 && p.p_y > 1.0 / p.tilde_gamma_y))
        bad(s.path("tilde_gamma_y"), "need p_y > 1/tilde_gamma_y");
    cfg.mesh_policy = p;
}

void parse_simulation(RunConfig& cfg, const json& doc)
{
    Section s(sub(doc, "simulation"), "/simulation", {"seed", "noise_scale", "blowup_guard", "force"});
    cfg.seed = s.count("seed", 1);
    cfg.simulation.noise_scale = s.number("noise_scale", 1.0);
    cfg.simulation.blowup_guard = s.number("blowup_guard", 1e6);
    cfg.simulation.force = s.flag("force", false);
    if (!(cfg.simulation.noise_scale >= 0.0)) bad(s.path("noise_scale"), "must be >= 0");
    if (!(cfg.simulation.blowup_guard > 0.0)) bad(s.path("blowup_guard"), "must be > 0");
}

void parse_output(RunConfig& cfg, const json& doc)
{
    Section s(sub(doc, "output"), "/output", {"dir", "formats"});
    cfg.output.dir = s.text("dir", "out");
    if (s.has("formats")) {
        const json& f = s.at("formats");
        if (!f.is_array() || f.empty()) bad(s.path("formats"), "expected a non-empty array");
        cfg.output.csv = cfg.output.json = false;
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::string p = s.path("formats") + "/" + std::to_string(i);
            if (!f[i].is_string()) bad(p, "expected a string");
            auto name = f[i].get<std::string>();
            if (name == "csv")
                cfg.output.csv = true;
            else if (name == "json")
                cfg.output.json = true;
            else
                bad(p, "expected csv or json");
        }
    }
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc)
{
    Section top(doc, "", {"model", "grid", "estimator", "mc", "mesh_policy", "simulation", "output"});
    RunConfig cfg;
    parse_model(cfg, doc);
    parse_grid(cfg, doc);
    parse_estimator(cfg, doc);
    parse_mc(cfg, doc);
    parse_mesh_policy(cfg, doc);
    parse_simulation(cfg, doc);
    parse_output(cfg, doc);

    checked("/model", [&] { cfg.model.validate_for(cfg.grid); });
    if (cfg.estimator.kind == EstimatorKind::Spectral)
        checked("/model/reaction", [&] {
            require(cfg.model.reaction.is_linear(), "spectral estimator requires the linear reaction");
        });
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::Config, path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

MCConfig RunConfig::mc_config() const
{
    MCConfig c;
    c.model = model;
    c.grid = grid;
    c.nus = mc.nus.empty() ? std::vector<double>{model.nu} : mc.nus;
    c.runs = mc.runs;
    c.base_seed = mc.base_seed;
    c.estimator = estimator;
    c.alpha_bar = alpha_bar;
    c.threads = mc.threads;
    c.paired_seeds = mc.paired_seeds;
    c.max_blowup_fraction = mc.max_blowup_fraction;
    c.mesh_policy = mesh_policy;
    c.simulation = simulation;
    checked("/mc", [&] { c.validate(); });
    return c;
}

KnownPhysics RunConfig::physics() const
{
    return KnownPhysics::from_model(model, estimator.forward);
}

}  // namespace spdelab
