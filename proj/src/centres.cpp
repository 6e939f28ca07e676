#include "cpm/centres.hpp"

#include <cmath>

namespace cpm {

namespace {

double checked_intensity(const ReferenceMeasure& ref, const Point& p) {
    const double v = ref.intensity(p);
    require(v >= 0.0, "intensity must be nonnegative");
    require(v <= ref.intensity_upper_bound * (1.0 + 1e-12),
            "intensity exceeds its declared upper bound (model misspecification)");
    return v;
}

Configuration sample_poisson(const ReferenceMeasure& ref, const Window& w, RandomStream& rng) {
    Configuration cfg{{}, w};
    const double bound = ref.intensity_upper_bound;
    require(bound >= 0.0, "intensity_upper_bound must be nonnegative");
    if (bound == 0.0) return cfg;
    const long n = rng.poisson(bound * w.volume());
    cfg.points.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        Point p = w.sample_uniform(rng);
        if (rng.uniform() * bound < checked_intensity(ref, p)) cfg.points.push_back(std::move(p));
    }
    return cfg;
}

double pair_energy(const Configuration& cfg, const Point& p, const PairPotential& pot,
                   std::size_t skip_index) {
    double e = 0.0;
    for (std::size_t i = 0; i < cfg.points.size(); ++i) {
        if (i == skip_index) continue;
        e += pot(cfg.points[i], p);
        if (std::isinf(e)) return e;
    }
    return e;
}

// exp(-beta * e) with infinite energy forbidden for every beta.
double boltzmann(double beta, double e) {
    if (std::isinf(e)) return e > 0.0 ? 0.0 : HUGE_VAL;
    return std::exp(-beta * e);
}

}  // namespace

ReferenceMeasure ReferenceMeasure::constant(const Window& w, double rate) {
    require(rate >= 0.0, "constant intensity must be nonnegative");
    return ReferenceMeasure{w, [rate](const Point&) { return rate; }, rate};
}

ReferenceMeasure ReferenceMeasure::with_intensity(const Window& w, IntensityFn f, double bound) {
    require(bound > 0.0, "intensity_upper_bound must be positive");
    return ReferenceMeasure{w, std::move(f), bound};
}

double ReferenceMeasure::mass(const Window& w, RandomStream& rng, std::size_t n) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += intensity(w.sample_uniform(rng));
    return w.volume() * sum / static_cast<double>(n);
}

CentreProcess CentreProcess::poisson(ReferenceMeasure theta) {
    CentreProcess p;
    p.variant = Variant::Poisson;
    p.reference = std::move(theta);
    return p;
}

CentreProcess CentreProcess::gibbs(ReferenceMeasure theta, GibbsSpec spec) {
    require(spec.sweeps >= 1, "gibbs: sweeps must be >= 1");
    require(static_cast<bool>(spec.potential), "gibbs: pair potential required");
    CentreProcess p;
    p.variant = Variant::Gibbs;
    p.reference = std::move(theta);
    p.gibbs_spec = std::move(spec);
    return p;
}

CentreProcess CentreProcess::lattice(const Window& w, std::vector<Point> points) {
    for (const auto& pt : points)
        require(pt.geom == w.geom, "lattice: point on a different geometry");
    CentreProcess p;
    p.variant = Variant::Lattice;
    p.reference = ReferenceMeasure::constant(w, 0.0);
    p.lattice_points = std::move(points);
    return p;
}

Configuration sample_centres(const CentreProcess& process, RandomStream& rng) {
    return sample_centres_on(process, process.reference.window, rng);
}

Configuration sample_centres_on(const CentreProcess& process, const Window& w,
                                RandomStream& rng) {
    switch (process.variant) {
        case CentreProcess::Variant::Poisson:
            return sample_poisson(process.reference, w, rng);
        case CentreProcess::Variant::Lattice:
            // The fixed configuration, exactly, regardless of the window.
            return Configuration{process.lattice_points, w};
        case CentreProcess::Variant::Gibbs: {
            ReferenceMeasure ref = process.reference;
            ref.window = w;
            CentreProcess local = process;
            local.reference = ref;
            Configuration state = sample_poisson(ref, w, rng);
            for (int s = 0; s < process.gibbs_spec.sweeps; ++s)
                state = gibbs_step(std::move(state), local, rng);
            return state;
        }
    }
    fail("sample_centres_on: unreachable");
}

Configuration gibbs_step(Configuration state, const CentreProcess& process, RandomStream& rng) {
    require(process.variant == CentreProcess::Variant::Gibbs, "gibbs_step: not a Gibbs process");
    const auto& ref = process.reference;
    const auto& spec = process.gibbs_spec;
    const Window& w = state.window;
    const double vol = w.volume();
    const double beta = spec.inverse_temperature;

    // Sweep length must not depend on the current state: a state-dependent
    // repetition count of an invariant kernel is not invariant.  Scale by the
    // expected count instead.
    const auto proposals = static_cast<std::size_t>(
        std::ceil(ref.intensity_upper_bound * vol)) + 1;
    for (std::size_t k = 0; k < proposals; ++k) {
        const double what = rng.uniform();
        const std::size_t n = state.points.size();
        if (what < 1.0 / 3.0) {
            // birth
            Point p = w.sample_uniform(rng);
            const double lam = checked_intensity(ref, p);
            const double de = pair_energy(state, p, spec.potential, state.points.size());
            const double ratio = lam * vol * boltzmann(beta, de) / static_cast<double>(n + 1);
            if (rng.uniform() < ratio) state.points.push_back(std::move(p));
        } else if (what < 2.0 / 3.0) {
            // death
            if (n == 0) continue;
            const std::size_t i = rng.uniform_index(n);
            const double lam = checked_intensity(ref, state.points[i]);
            const double de = pair_energy(state, state.points[i], spec.potential, i);
            const double ratio =
                static_cast<double>(n) / (boltzmann(beta, de) * lam * vol);
            if (rng.uniform() < ratio) {
                state.points.erase(state.points.begin() + static_cast<std::ptrdiff_t>(i));
            }
        } else {
            // move: symmetric jitter, rejected if it leaves the window
            if (n == 0) continue;
            const std::size_t i = rng.uniform_index(n);
            Point cur = state.points[i];
            require(cur.geom.flat(), "gibbs move step expects a flat backend");
            Vec nx(cur.x.size());
            for (std::size_t d = 0; d < nx.size(); ++d)
                nx[d] = cur.x[d] + spec.move_scale * rng.normal();
            Point prop{cur.geom, std::move(nx)};
            if (!w.contains(prop)) continue;
            const double lam_new = checked_intensity(ref, prop);
            const double lam_old = checked_intensity(ref, cur);
            if (lam_old == 0.0) continue;
            const double e_new = pair_energy(state, prop, spec.potential, i);
            const double e_old = pair_energy(state, cur, spec.potential, i);
            const double ratio = (lam_new / lam_old) * boltzmann(beta, e_new) / boltzmann(beta, e_old);
            if (rng.uniform() < ratio) state.points[i] = std::move(prop);
        }
    }
    return state;
}

PairPotential hard_core_potential(double radius) {
    require(radius > 0.0, "hard_core_potential: radius must be positive");
    return [radius](const Point& a, const Point& b) {
        return distance(a, b) < radius ? HUGE_VAL : 0.0;
    };
}

PairPotential strauss_potential(double radius, double strength) {
    require(radius > 0.0, "strauss_potential: radius must be positive");
    return [radius, strength](const Point& a, const Point& b) {
        return distance(a, b) < radius ? strength : 0.0;
    };
}

}  // namespace cpm
