#include "cpm/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cpm/parallel.hpp"
#include "json.hpp"

namespace cpm {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

double parse_double_token(const std::string& t, int line) {
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(line, "expected a number, got '" + t + "'");
    return v;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile cfg;
    cfg.text_ = text;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                throw ConfigError(line, "malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "expected 'key = value', got '" + s + "'");
        if (section.empty()) throw ConfigError(line, "entry before any [section] header");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(line, "empty key");
        auto& sec = cfg.sections_[section];
        if (sec.count(key)) throw ConfigError(line, "duplicate key '" + section + "." + key + "'");
        sec[key] = Entry{value, line};
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end())
        throw ConfigError(0, "missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
        throw ConfigError(0, "missing key '" + key + "' in section [" + section + "]");
    return k->second.value;
}

std::string ConfigFile::get_string_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    return parse_double_token(get_string(section, key), line_of(section, key));
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key) const {
    const std::string t = get_string(section, key);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(line_of(section, key), "expected an unsigned integer for '" + key + "'");
    return v;
}

long ConfigFile::get_long_or(const std::string& section, const std::string& key,
                             long fallback) const {
    if (!has(section, key)) return fallback;
    return static_cast<long>(get_double(section, key));
}

Vec ConfigFile::get_vec(const std::string& section, const std::string& key) const {
    const int line = line_of(section, key);
    Vec v;
    for (const auto& t : tokens(get_string(section, key)))
        v.push_back(parse_double_token(t, line));
    if (v.empty()) throw ConfigError(line, "expected numbers for '" + key + "'");
    return v;
}

int ConfigFile::line_of(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return 0;
    const auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.line;
}

void ConfigFile::fail_at(const std::string& section, const std::string& key,
                         const std::string& msg) const {
    throw ConfigError(line_of(section, key), "[" + section + "] " + key + ": " + msg);
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string hash_config(const std::string& text, const ExperimentOverrides& overrides) {
    std::string bytes = text;
    if (overrides.seed) bytes += "\n@seed=" + std::to_string(*overrides.seed);
    if (overrides.replicas) bytes += "\n@replicas=" + std::to_string(*overrides.replicas);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace {

Geometry build_geometry(const ConfigFile& cfg) {
    const std::string kind = cfg.get_string_or("geometry", "kind", "euclidean");
    if (kind == "euclidean") {
        const long d = cfg.get_long_or("geometry", "dim", 2);
        if (d < 1 || d > 16) cfg.fail_at("geometry", "dim", "dimension out of range 1..16");
        return Geometry::euclidean(static_cast<int>(d));
    }
    if (kind == "hyperbolic2") return Geometry::hyperbolic2();
    if (kind == "se2_on_r2") return Geometry::se2_on_r2();
    cfg.fail_at("geometry", "kind", "unknown geometry '" + kind + "'");
}

Window build_window(const ConfigFile& cfg, const Geometry& g) {
    if (g.kind == GeometryKind::Hyperbolic2) {
        if (!cfg.has("window", "radius"))
            throw ConfigError(0, "[window] radius: required for hyperbolic2");
        return Window::metric_ball(origin(g), cfg.get_double("window", "radius"));
    }
    const Vec lo = cfg.get_vec("window", "lo");
    const Vec hi = cfg.get_vec("window", "hi");
    if (static_cast<int>(lo.size()) != g.dim || lo.size() != hi.size())
        cfg.fail_at("window", "lo", "bounds must match the chart dimension");
    return Window::box(g, lo, hi);
}

ReferenceMeasure build_reference(const ConfigFile& cfg, const Window& w) {
    const std::string kind = cfg.get_string_or("reference", "intensity", "constant");
    if (kind == "constant") {
        return ReferenceMeasure::constant(w, cfg.get_double_or("reference", "rate", 1.0));
    }
    if (kind == "linear") {
        const double base = cfg.get_double_or("reference", "base", 0.0);
        const Vec grad = cfg.get_vec("reference", "grad");
        if (!w.geom.flat()) cfg.fail_at("reference", "intensity", "linear needs a flat backend");
        if (grad.size() != w.lo.size())
            cfg.fail_at("reference", "grad", "gradient must match the chart dimension");
        double bound = base;
        for (std::size_t i = 0; i < grad.size(); ++i)
            bound += grad[i] * (grad[i] >= 0.0 ? w.hi[i] : w.lo[i]);
        const double lo_val = [&] {
            double v = base;
            for (std::size_t i = 0; i < grad.size(); ++i)
                v += grad[i] * (grad[i] >= 0.0 ? w.lo[i] : w.hi[i]);
            return v;
        }();
        if (lo_val < 0.0) cfg.fail_at("reference", "grad", "intensity negative on the window");
        auto fn = [base, grad](const Point& p) {
            double v = base;
            for (std::size_t i = 0; i < grad.size(); ++i) v += grad[i] * p.x[i];
            return std::max(v, 0.0);
        };
        return ReferenceMeasure::with_intensity(w, fn, std::max(bound, 1e-300));
    }
    cfg.fail_at("reference", "intensity", "unknown intensity family '" + kind + "'");
}

CentreProcess build_centres(const ConfigFile& cfg, const ReferenceMeasure& ref,
                            const Geometry& g) {
    const std::string variant = cfg.get_string_or("centres", "variant", "poisson");
    if (variant == "poisson") return CentreProcess::poisson(ref);
    if (variant == "gibbs") {
        GibbsSpec spec;
        const std::string pot = cfg.get_string_or("centres", "potential", "strauss");
        const double radius = cfg.get_double_or("centres", "pot_radius", 0.05);
        if (pot == "hard_core") {
            spec.potential = hard_core_potential(radius);
        } else if (pot == "strauss") {
            spec.potential =
                strauss_potential(radius, cfg.get_double_or("centres", "pot_strength", 1.0));
        } else {
            cfg.fail_at("centres", "potential", "unknown potential '" + pot + "'");
        }
        spec.inverse_temperature = cfg.get_double_or("centres", "beta", 1.0);
        spec.sweeps = static_cast<int>(cfg.get_long_or("centres", "sweeps", 200));
        spec.move_scale = cfg.get_double_or("centres", "move_scale", 0.1);
        return CentreProcess::gibbs(ref, std::move(spec));
    }
    if (variant == "lattice") {
        std::vector<Point> pts;
        if (cfg.has("centres", "points_file")) {
            const std::string path = cfg.get_string("centres", "points_file");
            std::ifstream in(path);
            if (!in) cfg.fail_at("centres", "points_file", "cannot open '" + path + "'");
            pts = read_point_csv(in, g);
        } else {
            const Vec flat = cfg.get_vec("centres", "points");
            if (flat.size() % g.dim != 0)
                cfg.fail_at("centres", "points", "coordinate count not a multiple of dim");
            for (std::size_t i = 0; i + g.dim <= flat.size(); i += g.dim)
                pts.push_back(make_point(g, Vec(flat.begin() + i, flat.begin() + i + g.dim)));
        }
        return CentreProcess::lattice(ref.window, std::move(pts));
    }
    cfg.fail_at("centres", "variant", "unknown centre variant '" + variant + "'");
}

ClusterKernel build_kernel(const ConfigFile& cfg, const Geometry& g) {
    ClusterKernel k;

    const std::string size = cfg.get_string_or("kernel", "size", "fixed");
    if (size == "fixed") {
        k.parent.size = SizeDistribution::fixed(
            static_cast<int>(cfg.get_long_or("kernel", "n", 1)));
    } else if (size == "poisson") {
        k.parent.size =
            SizeDistribution::poisson(cfg.get_double_or("kernel", "mean", 1.0),
                                      static_cast<int>(cfg.get_long_or("kernel", "n_max", 64)));
    } else if (size == "explicit") {
        const Vec probs = cfg.get_vec("kernel", "probs");
        k.parent.size = SizeDistribution::explicit_probs(
            std::vector<double>(probs.begin(), probs.end()));
    } else {
        cfg.fail_at("kernel", "size", "unknown size law '" + size + "'");
    }

    const std::string placement = cfg.get_string_or("kernel", "placement", "translation");
    const std::string component = cfg.get_string_or("kernel", "component", "gaussian");
    auto& cm = k.parent.component;

    if (placement == "translation") {
        k.placement = PlacementMap::translation(g);
        cm.dim = g.dim;
        if (component == "gaussian") {
            cm.kind = ComponentModel::Kind::GaussianOffset;
            cm.sigma = cfg.get_double_or("kernel", "sigma", 0.1);
        } else if (component == "uniform_ball") {
            cm.kind = ComponentModel::Kind::UniformBallOffset;
            cm.ball_radius = cfg.get_double_or("kernel", "ball_radius", 1.0);
        } else if (component == "dirac") {
            cm.kind = ComponentModel::Kind::DiracOffset;
            cm.offset = cfg.has("kernel", "offset") ? cfg.get_vec("kernel", "offset")
                                                    : Vec(g.dim, 0.0);
        } else {
            cfg.fail_at("kernel", "component",
                        "component '" + component + "' not available for translation");
        }
    } else if (placement == "group_action") {
        if (g.kind != GeometryKind::Se2OnR2)
            cfg.fail_at("kernel", "placement", "group_action needs geometry se2_on_r2");
        k.placement = PlacementMap::group_action();
        cm.kind = ComponentModel::Kind::Se2Rotation;
        cm.angle_uniform = cfg.get_string_or("kernel", "angle", "fixed") == "uniform";
        cm.angle = cfg.get_double_or("kernel", "angle_value", M_PI);
        cm.rot_centre_mean = cfg.has("kernel", "centre_mean") ? cfg.get_vec("kernel", "centre_mean")
                                                              : Vec{0.0, 0.0};
        cm.rot_centre_sigma = cfg.get_double_or("kernel", "centre_sigma", 0.0);
    } else if (placement == "geodesic_transport") {
        k.placement = PlacementMap::geodesic_transport(origin(g));
        cm.kind = ComponentModel::Kind::TangentGaussian;
        cm.dim = g.flat() ? g.dim : 2;
        cm.sigma = cfg.get_double_or("kernel", "sigma", 0.1);
    } else if (placement == "radial_angular") {
        k.placement = PlacementMap::radial_angular(g);
        cm.kind = ComponentModel::Kind::Radius;
        cm.radius_lo = cfg.get_double_or("kernel", "radius_lo", 1.0);
        cm.radius_hi = cfg.get_double_or("kernel", "radius_hi", cm.radius_lo);
        if (cm.radius_lo < 0.0 || cm.radius_hi < cm.radius_lo)
            cfg.fail_at("kernel", "radius_lo", "need 0 <= radius_lo <= radius_hi");
    } else {
        cfg.fail_at("kernel", "placement", "unknown placement '" + placement + "'");
    }
    return k;
}

TestFunction build_test_function(const ConfigFile& cfg, const Geometry& g) {
    const std::string kind = cfg.get_string_or("test", "f_kind", "indicator");
    const double scale = cfg.get_double_or("test", "f_scale", 1.0);
    if (kind == "indicator") {
        const std::string shape = cfg.get_string_or("test", "f_shape", "box");
        if (shape == "box")
            return TestFunction::indicator(
                scale, Region::box(cfg.get_vec("test", "f_lo"), cfg.get_vec("test", "f_hi")));
        if (shape == "ball")
            return TestFunction::indicator(
                scale, Region::ball(make_point(g, cfg.get_vec("test", "f_centre")),
                                    cfg.get_double("test", "f_radius")));
        cfg.fail_at("test", "f_shape", "unknown shape '" + shape + "'");
    }
    if (kind == "bump") {
        return TestFunction::bump(make_point(g, cfg.get_vec("test", "f_centre")),
                                  cfg.get_double_or("test", "f_radius", 0.25), scale);
    }
    cfg.fail_at("test", "f_kind", "unknown test function '" + kind + "'");
}

Region build_region(const ConfigFile& cfg, const Geometry& g, const std::string& prefix) {
    const std::string shape = cfg.get_string_or("test", prefix + "_shape", "box");
    if (shape == "box")
        return Region::box(cfg.get_vec("test", prefix + "_lo"), cfg.get_vec("test", prefix + "_hi"));
    if (shape == "ball")
        return Region::ball(make_point(g, cfg.get_vec("test", prefix + "_centre")),
                            cfg.get_double("test", prefix + "_radius"));
    cfg.fail_at("test", prefix + "_shape", "unknown shape '" + shape + "'");
}

json record_estimate(const EstimateWithError& e) {
    return json{{"value", e.value}, {"std_error", e.std_error}, {"n", e.n}};
}

}  // namespace

Experiment build_experiment(const std::string& config_text,
                            const ExperimentOverrides& overrides) {
    ConfigFile cfg = ConfigFile::parse(config_text);

    const Geometry g = build_geometry(cfg);
    const Window w = build_window(cfg, g);
    const ReferenceMeasure ref = build_reference(cfg, w);
    CentreProcess centres = build_centres(cfg, ref, g);
    ClusterKernel kernel = build_kernel(cfg, g);

    Experiment ex;
    if (cfg.has("kernel", "cluster_range")) {
        ex.model = ClusterProcessModel::make(std::move(centres), std::move(kernel),
                                             cfg.get_double("kernel", "cluster_range"));
    } else {
        ex.model = ClusterProcessModel::make(std::move(centres), std::move(kernel));
    }

    if (!overrides.seed && !cfg.has("run", "seed"))
        throw ConfigError(0, "[run] seed: required (wall-clock seeding is not supported)");
    ex.seed = overrides.seed ? *overrides.seed : cfg.get_u64("run", "seed");
    ex.replicas = overrides.replicas
                      ? *overrides.replicas
                      : static_cast<std::size_t>(cfg.get_long_or("run", "replicas", 1000));
    ex.threads = overrides.threads ? *overrides.threads
                                   : static_cast<int>(cfg.get_long_or("run", "threads", 0));
    ex.test_kind = cfg.get_string_or("test", "kind", "sample");
    ex.config_hash = hash_config(config_text, overrides);
    ex.config = std::move(cfg);
    return ex;
}

void write_point_csv(std::ostream& os, const std::vector<Configuration>& samples) {
    require(!samples.empty(), "write_point_csv: no samples");
    const int dim = samples.front().window.geom.dim;
    const bool with_mark = samples.size() > 1;
    for (int i = 1; i <= dim; ++i) os << (i > 1 ? "," : "") << "x" << i;
    if (with_mark) os << ",mark";
    os << "\n";
    for (std::size_t s = 0; s < samples.size(); ++s) {
        for (const auto& p : samples[s].points) {
            for (int i = 0; i < dim; ++i) os << (i > 0 ? "," : "") << format_double(p.x[i]);
            if (with_mark) os << "," << s;
            os << "\n";
        }
    }
}

std::vector<Point> read_point_csv(std::istream& is, const Geometry& g) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "point csv: missing header");
    std::vector<Point> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        Vec coords;
        std::istringstream cell(line);
        std::string tok;
        while (std::getline(cell, tok, ',')) coords.push_back(parse_double_token(trim(tok), lineno));
        if (static_cast<int>(coords.size()) == g.dim + 1) coords.pop_back();  // drop mark
        if (static_cast<int>(coords.size()) != g.dim)
            throw ConfigError(lineno, "point csv: wrong coordinate count");
        out.push_back(make_point(g, std::move(coords)));
    }
    return out;
}

namespace {

struct OutputSink {
    std::filesystem::path dir;
    std::string config_hash;
    std::uint64_t seed;

    json base_record(const std::string& test) const {
        return json{{"test", test}, {"config_hash", config_hash}, {"seed", seed}};
    }

    void write_jsonl(const json& record) const {
        std::ofstream os(dir / "result.jsonl", std::ios::app | std::ios::binary);
        os << record.dump() << "\n";
    }
};

int gate(const json& record, std::ostream& log, bool ok) {
    log << record.dump() << "\n";
    if (!ok) log << "GATE FAILED\n";
    return ok ? 0 : 2;
}

int run_sample(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    RandomStream rng(ex.seed);
    std::vector<Configuration> samples;
    samples.reserve(ex.replicas);
    for (std::size_t i = 0; i < ex.replicas; ++i) {
        RandomStream local = rng.substream(i);
        samples.push_back(sample_cluster_process(ex.model, local));
    }
    std::ofstream os(sink.dir / "points.csv", std::ios::binary);
    write_point_csv(os, samples);
    json rec = sink.base_record("sample");
    std::size_t total = 0;
    for (const auto& s : samples) total += s.size();
    rec["replicas"] = ex.replicas;
    rec["total_points"] = total;
    sink.write_jsonl(rec);
    log << rec.dump() << "\n";
    return 0;
}

int run_laplace_check(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    const auto& cfg = ex.config;
    const TestFunction f = build_test_function(cfg, ex.model.geometry);
    RandomStream rng(ex.seed);

    std::vector<double> values(ex.replicas);
    run_replicas(ex.replicas, rng.substream(1), [&](std::size_t i, RandomStream& local) {
        values[i] = std::exp(-pair_functional(f, sample_cluster_process(ex.model, local)));
        return 0.0;
    });
    const EstimateWithError empirical = estimate_of(values);

    RandomStream th_rng = rng.substream(2);
    const auto n_outer = static_cast<std::size_t>(cfg.get_long_or("test", "nodes", 1 << 14));
    const auto n_inner = static_cast<std::size_t>(cfg.get_long_or("test", "inner", 64));
    const EstimateWithError theoretical =
        cluster_laplace_theoretical(ex.model, f, th_rng, n_outer, n_inner);

    const double z = z_score(empirical, theoretical);
    json rec = sink.base_record("laplace-check");
    rec["empirical"] = record_estimate(empirical);
    rec["theoretical"] = record_estimate(theoretical);
    rec["z"] = z;
    sink.write_jsonl(rec);
    return gate(rec, log, std::abs(z) <= 3.0);
}

int run_varpi_check(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    const TestFunction f = build_test_function(ex.config, ex.model.geometry);
    RandomStream rng(ex.seed);

    std::vector<double> a(ex.replicas), b(ex.replicas);
    run_replicas(ex.replicas, rng.substream(1), [&](std::size_t i, RandomStream& local) {
        a[i] = pair_functional(f, sample_cluster_process(ex.model, local));
        return 0.0;
    });
    run_replicas(ex.replicas, rng.substream(2), [&](std::size_t i, RandomStream& local) {
        b[i] = pair_functional(f, sample_via_varpi(ex.model, local));
        return 0.0;
    });
    const KsResult ks = ks_two_sample(a, b);

    // shared-seed pipelines must agree sample by sample
    RandomStream s1 = rng.substream(3), s2 = rng.substream(3);
    const Configuration c1 = sample_cluster_process(ex.model, s1);
    const Configuration c2 = sample_via_varpi(ex.model, s2);
    const bool identical = c1.points.size() == c2.points.size() &&
                           [&] {
                               for (std::size_t i = 0; i < c1.points.size(); ++i)
                                   if (!(c1.points[i].x == c2.points[i].x)) return false;
                               return true;
                           }();

    json rec = sink.base_record("varpi-check");
    rec["ks_statistic"] = ks.statistic;
    rec["ks_p_value"] = ks.p_value;
    rec["shared_seed_identical"] = identical;
    rec["replicas"] = ex.replicas;
    sink.write_jsonl(rec);
    return gate(rec, log, identical && ks.p_value >= 0.001);
}

int run_droplet_check(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    const Region shape = build_region(ex.config, ex.model.geometry, "b");
    RandomStream rng(ex.seed);
    const auto n_mc =
        static_cast<std::size_t>(ex.config.get_long_or("test", "n_mc", 1 << 16));
    const SigmaBarCheck check = sigma_bar_check(ex.model, shape, rng, n_mc);
    json rec = sink.base_record("droplet-check");
    rec["lhs"] = check.lhs.value;
    rec["rhs"] = check.rhs.value;
    rec["se_lhs"] = check.lhs.std_error;
    rec["se_rhs"] = check.rhs.std_error;
    rec["z"] = check.z;
    sink.write_jsonl(rec);
    return gate(rec, log, std::abs(check.z) <= 3.0);
}

int run_qi_check(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    const auto& cfg = ex.config;
    const Geometry g = ex.model.geometry;
    const Point centre = make_point(
        g, cfg.has("test", "phi_centre") ? cfg.get_vec("test", "phi_centre") : Vec(g.dim, 0.5));
    Vec dir = cfg.has("test", "phi_direction") ? cfg.get_vec("test", "phi_direction")
                                               : [&] {
                                                     Vec d(g.dim, 0.0);
                                                     d[0] = 1.0;
                                                     return d;
                                                 }();
    const Diffeomorphism phi = Diffeomorphism::bump_flow(
        centre, cfg.get_double_or("test", "phi_radius", 0.3), dir,
        cfg.get_double_or("test", "phi_strength", 0.05));
    const TestFunction f = build_test_function(cfg, g);
    require(f.has_gradient(), "qi-check: test function must be a bump");
    const CylinderFunction F = CylinderFunction::exp_neg({f}, Vec{1.0});

    RandomStream rng(ex.seed);
    const PairedCheck check = qi_test(ex.model, phi, F, rng, ex.replicas);

    // unit-mean density on an independent stream
    std::vector<double> rs(ex.replicas);
    run_replicas(ex.replicas, rng.substream(7), [&](std::size_t i, RandomStream& local) {
        rs[i] = rn_density(ex.model.kernel, phi, sample_marked(ex.model, local));
        return 0.0;
    });
    const EstimateWithError r_mean = estimate_of(rs);
    const double rz = z_score(r_mean, 1.0);

    json rec = sink.base_record("qi-check");
    rec["lhs"] = record_estimate(check.lhs);
    rec["rhs"] = record_estimate(check.rhs);
    rec["z"] = check.z;
    rec["density_mean"] = record_estimate(r_mean);
    rec["density_mean_z"] = rz;
    sink.write_jsonl(rec);
    return gate(rec, log, std::abs(check.z) <= 3.0 && std::abs(rz) <= 3.0);
}

int run_ibp_check(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    const auto& cfg = ex.config;
    const Geometry g = ex.model.geometry;
    const TestFunction f = build_test_function(cfg, g);
    require(f.has_gradient(), "ibp-check: test function must be a bump");
    const CylinderFunction F = CylinderFunction::exp_neg({f}, Vec{1.0});

    const Point v_centre = make_point(
        g, cfg.has("test", "v_centre") ? cfg.get_vec("test", "v_centre") : Vec(g.dim, 0.5));
    Vec dir = cfg.has("test", "v_direction") ? cfg.get_vec("test", "v_direction")
                                             : [&] {
                                                   Vec d(g.dim, 0.0);
                                                   d[0] = 1.0;
                                                   return d;
                                               }();
    const VectorField v = VectorField::bump_directional(
        v_centre, cfg.get_double_or("test", "v_radius", 0.3), dir);

    RandomStream rng(ex.seed);
    const PairedCheck check = ibp_test(ex.model, F, v, rng, ex.replicas);

    std::vector<double> bs(ex.replicas);
    run_replicas(ex.replicas, rng.substream(11), [&](std::size_t i, RandomStream& local) {
        bs[i] = b_marked(ex.model.kernel, sample_marked(ex.model, local), v);
        return 0.0;
    });
    const EstimateWithError b_mean = estimate_of(bs);
    const double bz = z_score(b_mean, 0.0);

    json rec = sink.base_record("ibp-check");
    rec["lhs"] = record_estimate(check.lhs);
    rec["rhs"] = record_estimate(check.rhs);
    rec["z"] = check.z;
    rec["b_mean"] = record_estimate(b_mean);
    rec["b_mean_z"] = bz;
    sink.write_jsonl(rec);
    return gate(rec, log, std::abs(check.z) <= 3.0 && std::abs(bz) <= 3.0);
}

int run_corr_check(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    const auto& cfg = ex.config;
    const double kappa = cfg.get_double_or("test", "kappa", 1.0);
    const Region b1 = build_region(cfg, ex.model.geometry, "b");
    RandomStream rng(ex.seed);

    std::vector<Configuration> samples;
    samples.reserve(ex.replicas);
    for (std::size_t i = 0; i < ex.replicas; ++i) {
        RandomStream local = rng.substream(i);
        samples.push_back(sample_centres(ex.model.centres, local));
    }

    SymmetricFunction phi1;
    phi1.unary = [&b1](const Point& p) { return b1.contains(p) ? 1.0 : 0.0; };
    RandomStream mc1 = rng.substream(ex.replicas + 1);
    const CorrelationCheck c1 = correlation_identity_check(
        samples, phi1, kappa, ex.model.centres.reference, 1, mc1);

    SymmetricFunction phi2;
    phi2.binary = [&b1](const Point& p, const Point& q) {
        return ((b1.contains(p) ? 1.0 : 0.0) + (b1.contains(q) ? 1.0 : 0.0)) * 0.5;
    };
    RandomStream mc2 = rng.substream(ex.replicas + 2);
    const CorrelationCheck c2 = correlation_identity_check(
        samples, phi2, kappa * kappa, ex.model.centres.reference, 2, mc2);

    json rec = sink.base_record("corr-check");
    rec["order1"] = json{{"lhs", c1.lhs.value}, {"rhs", c1.rhs.value}, {"z", c1.z}};
    rec["order2"] = json{{"lhs", c2.lhs.value}, {"rhs", c2.rhs.value}, {"z", c2.z}};
    sink.write_jsonl(rec);
    return gate(rec, log, std::abs(c1.z) <= 3.0 && std::abs(c2.z) <= 3.0);
}

int run_dynamics(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    const auto& cfg = ex.config;
    require(ex.model.kernel.is_translation_gaussian(),
            "dynamics: translation-Gaussian kernels only");
    DynamicsConfig dyn;
    const double sigma2 = sqr(ex.model.kernel.gaussian_sigma());
    dyn.time_step = cfg.get_double_or("test", "dt", 0.01 * sigma2);
    dyn.n_steps = static_cast<std::size_t>(cfg.get_long_or("test", "steps", 1000));
    dyn.stride = static_cast<std::size_t>(cfg.get_long_or("test", "stride", 10));
    dyn.box = ex.model.dilated_window();
    const TestFunction f = build_test_function(cfg, ex.model.geometry);

    RandomStream rng(ex.seed);
    const StationarityResult res = stationarity_test(ex.model, dyn, f, rng, ex.replicas);

    std::ofstream os(sink.dir / "series.csv", std::ios::binary);
    os << "t,mean,se\n";
    for (std::size_t i = 0; i < res.times.size(); ++i)
        os << format_double(res.times[i]) << "," << format_double(res.means[i]) << ","
           << format_double(res.std_errors[i]) << "\n";

    json rec = sink.base_record("dynamics");
    rec["drift_slope"] = res.drift.slope;
    rec["drift_z"] = res.drift.z;
    rec["steps"] = dyn.n_steps;
    rec["replicas"] = ex.replicas;
    sink.write_jsonl(rec);
    return gate(rec, log, std::abs(res.drift.z) <= 3.0);
}

int run_properness(Experiment& ex, const OutputSink& sink, std::ostream& log) {
    const Region shape = build_region(ex.config, ex.model.geometry, "b");
    RandomStream rng(ex.seed);
    const PropernessReport report = properness_report(ex.model, shape, rng, ex.replicas);
    json rec = sink.base_record("properness");
    rec["mean_clusters_hitting"] = record_estimate(report.mean_clusters_hitting);
    rec["multiplicity_count"] = report.multiplicity_count;
    rec["min_pairwise_distance"] =
        std::isfinite(report.min_pairwise_distance) ? report.min_pairwise_distance : -1.0;
    rec["mean_min_distance"] = record_estimate(report.mean_min_distance);
    sink.write_jsonl(rec);
    log << rec.dump() << "\n";
    return 0;
}

}  // namespace

int run_experiment(Experiment& ex, const std::string& subcommand,
                   const std::filesystem::path& out_dir, std::ostream& log) {
    std::filesystem::create_directories(out_dir);
    set_thread_count(ex.threads);
    OutputSink sink{out_dir, ex.config_hash, ex.seed};

    const std::string what = subcommand == "run" ? ex.test_kind : subcommand;
    if (what == "sample") return run_sample(ex, sink, log);
    if (what == "laplace-check") return run_laplace_check(ex, sink, log);
    if (what == "varpi-check") return run_varpi_check(ex, sink, log);
    if (what == "droplet-check") return run_droplet_check(ex, sink, log);
    if (what == "qi-check") return run_qi_check(ex, sink, log);
    if (what == "ibp-check") return run_ibp_check(ex, sink, log);
    if (what == "corr-check") return run_corr_check(ex, sink, log);
    if (what == "dynamics") return run_dynamics(ex, sink, log);
    if (what == "properness") return run_properness(ex, sink, log);
    throw ConfigError(ex.config.line_of("test", "kind"), "unknown test kind '" + what + "'");
}

}  // namespace cpm
