#include "cpm/stats.hpp"

#include <cmath>

namespace cpm {

namespace {

// G_x(f): mean over cluster draws of exp(-sum f(y_i)).
double cluster_laplace_node(const ClusterProcessModel& model, const TestFunction& f,
                            const Point& x, RandomStream& rng, std::size_t n_inner) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_inner; ++i) {
        const ClusterVector y = sample_cluster(model.kernel, x, rng);
        double s = 0.0;
        for (const auto& p : y) s += f(p);
        acc += std::exp(-s);
    }
    return acc / static_cast<double>(n_inner);
}

}  // namespace

double pair_functional(const TestFunction& f, const Configuration& gamma) {
    double s = 0.0;
    for (const auto& p : gamma.points) s += f(p);
    return s;
}

EstimateWithError empirical_laplace(const std::vector<Configuration>& samples,
                                    const TestFunction& f) {
    require(samples.size() >= 2, "empirical_laplace: need at least 2 samples");
    MeanAccumulator acc;
    for (const auto& g : samples) acc.add(std::exp(-pair_functional(f, g)));
    return acc.estimate();
}

EstimateWithError cluster_laplace_theoretical(const ClusterProcessModel& model,
                                              const TestFunction& f, RandomStream& rng,
                                              std::size_t n_outer, std::size_t n_inner) {
    require(n_outer >= 16 && n_inner >= 1, "cluster_laplace_theoretical: too few nodes");
    const auto& ref = model.centres.reference;

    if (model.centres.variant == CentreProcess::Variant::Lattice) {
        // finite product of per-centre cluster transforms
        double log_l = 0.0, var_log = 0.0;
        std::uint64_t id = 0;
        for (const auto& x : model.centres.lattice_points) {
            MeanAccumulator acc;
            RandomStream node_rng = rng.substream(++id);
            for (std::size_t i = 0; i < n_inner; ++i)
                acc.add(cluster_laplace_node(model, f, x, node_rng, 1));
            const auto g = acc.estimate();
            require(g.value > 0.0, "cluster_laplace_theoretical: vanishing node transform");
            log_l += std::log(g.value);
            var_log += sqr(g.std_error / g.value);
        }
        const double value = std::exp(log_l);
        return EstimateWithError{value, value * std::sqrt(var_log),
                                 n_inner * model.centres.lattice_points.size()};
    }

    require(model.centres.variant == CentreProcess::Variant::Poisson,
            "cluster_laplace_theoretical: no closed form for Gibbs centres; "
            "use empirical_laplace on both sides");

    // exp(-I), I = integral over the dilated window of (1 - G_x(f)) d theta.
    const Window domain = model.dilated_window();
    double integral = 0.0, variance = 0.0;

    if (domain.kind == Window::Kind::Box) {
        // stratified grid, two independent nodes per cell
        const std::size_t cells = std::max<std::size_t>(8, n_outer / 2);
        const int d = domain.geom.dim;
        const int per_axis = std::max(1, static_cast<int>(std::floor(
                                             std::pow(static_cast<double>(cells), 1.0 / d))));
        std::vector<int> index(static_cast<std::size_t>(d), 0);
        Vec width(domain.lo.size());
        for (std::size_t i = 0; i < width.size(); ++i)
            width[i] = (domain.hi[i] - domain.lo[i]) / per_axis;
        double cell_vol = 1.0;
        for (double w : width) cell_vol *= w;

        std::uint64_t id = 0;
        bool done = false;
        while (!done) {
            RandomStream cell_rng = rng.substream(++id);
            double g0 = 0.0, g1 = 0.0;
            for (int rep = 0; rep < 2; ++rep) {
                Vec x(width.size());
                for (std::size_t i = 0; i < width.size(); ++i)
                    x[i] = domain.lo[i] + (index[i] + cell_rng.uniform()) * width[i];
                const Point p{domain.geom, std::move(x)};
                const double g =
                    ref.intensity(p) * (1.0 - cluster_laplace_node(model, f, p, cell_rng, n_inner));
                (rep == 0 ? g0 : g1) = g;
            }
            integral += cell_vol * 0.5 * (g0 + g1);
            variance += sqr(cell_vol) * 0.25 * sqr(g0 - g1);  // variance of the 2-point cell mean

            for (int i = 0; i < d; ++i) {
                if (++index[static_cast<std::size_t>(i)] < per_axis) break;
                index[static_cast<std::size_t>(i)] = 0;
                if (i == d - 1) done = true;
            }
        }
    } else {
        MeanAccumulator acc;
        RandomStream mc_rng = rng.substream(1);
        for (std::size_t i = 0; i < n_outer; ++i) {
            const Point p = domain.sample_uniform(mc_rng);
            acc.add(ref.intensity(p) *
                    (1.0 - cluster_laplace_node(model, f, p, mc_rng, n_inner)));
        }
        const auto est = acc.estimate();
        integral = est.value * domain.volume();
        variance = sqr(est.std_error * domain.volume());
    }

    const double value = std::exp(-integral);
    // first-order delta method through exp(-I)
    return EstimateWithError{value, value * std::sqrt(variance), n_outer};
}

EstimateWithError moment_estimate(const std::vector<Configuration>& samples,
                                  const TestFunction& f, int order) {
    require(order >= 1 && order <= 4, "moment_estimate: order must be in 1..4");
    MeanAccumulator acc;
    for (const auto& g : samples)
        acc.add(std::pow(std::abs(pair_functional(f, g)), static_cast<double>(order)));
    return acc.estimate();
}

CorrelationCheck correlation_identity_check(const std::vector<Configuration>& samples,
                                            const SymmetricFunction& phi,
                                            double correlation_value,
                                            const ReferenceMeasure& theta, int order,
                                            RandomStream& rng, std::size_t n_mc) {
    require(order == 1 || order == 2, "correlation_identity_check: orders 1 and 2 only");
    require(!samples.empty(), "correlation_identity_check: no samples");

    MeanAccumulator lhs;
    for (const auto& g : samples) {
        double s = 0.0;
        if (order == 1) {
            for (const auto& p : g.points) s += phi.unary(p);
        } else {
            for (std::size_t a = 0; a < g.points.size(); ++a)
                for (std::size_t b = a + 1; b < g.points.size(); ++b)
                    s += phi.binary(g.points[a], g.points[b]);
        }
        lhs.add(s);
    }

    const Window& w = theta.window;
    const double vol = w.volume();
    MeanAccumulator rhs;
    for (std::size_t i = 0; i < n_mc; ++i) {
        if (order == 1) {
            const Point p = w.sample_uniform(rng);
            rhs.add(phi.unary(p) * theta.intensity(p) * correlation_value * vol);
        } else {
            const Point p = w.sample_uniform(rng);
            const Point q = w.sample_uniform(rng);
            rhs.add(0.5 * phi.binary(p, q) * theta.intensity(p) * theta.intensity(q) *
                    correlation_value * vol * vol);
        }
    }

    CorrelationCheck out;
    out.lhs = lhs.estimate();
    out.rhs = rhs.estimate();
    out.z = z_score(out.lhs, out.rhs);
    return out;
}

}  // namespace cpm
