#include "cpm/calculus.hpp"

#include <cmath>

#include "cpm/parallel.hpp"

namespace cpm {

CylinderFunction CylinderFunction::linear(std::vector<TestFunction> inner, Vec weights,
                                          double bias) {
    require(inner.size() == weights.size(), "cylinder: one weight per inner function");
    for (const auto& f : inner)
        require(f.has_gradient(), "cylinder: inner functions must be differentiable");
    CylinderFunction f;
    f.outer = Outer::Linear;
    f.inner = std::move(inner);
    f.weights = std::move(weights);
    f.bias = bias;
    return f;
}

CylinderFunction CylinderFunction::exp_neg(std::vector<TestFunction> inner, Vec weights,
                                           double bias) {
    CylinderFunction f = linear(std::move(inner), std::move(weights), bias);
    f.outer = Outer::ExpNeg;
    return f;
}

CylinderFunction CylinderFunction::constant(double c) {
    CylinderFunction f;
    f.outer = Outer::Linear;
    f.bias = c;
    return f;
}

Vec CylinderFunction::arguments(const Configuration& gamma) const {
    Vec u(inner.size(), 0.0);
    for (std::size_t j = 0; j < inner.size(); ++j)
        for (const auto& p : gamma.points) u[j] += inner[j](p);
    return u;
}

double CylinderFunction::eval(const Configuration& gamma) const {
    const Vec u = arguments(gamma);
    const double lin = bias + dot(weights, u);
    return outer == Outer::Linear ? lin : std::exp(-lin);
}

Vec CylinderFunction::outer_partials(const Vec& u) const {
    if (outer == Outer::Linear) return weights;
    const double value = std::exp(-(bias + dot(weights, u)));
    return (-value) * weights;
}

Vec CylinderFunction::point_gradient(const Configuration& gamma, const Point& p) const {
    Vec g(p.x.size(), 0.0);
    if (inner.empty()) return g;
    const Vec partials = outer_partials(arguments(gamma));
    for (std::size_t j = 0; j < inner.size(); ++j) {
        const Vec dphi = inner[j].gradient(p);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += partials[j] * dphi[i];
    }
    return g;
}

double gamma_gradient(const CylinderFunction& f, const Configuration& gamma,
                      const VectorField& v) {
    if (f.inner.empty() || gamma.empty()) return 0.0;
    double s = 0.0;
    for (const auto& p : gamma.points) {
        const Vec field = v(p);
        if (dot(field, field) == 0.0) continue;
        s += dot(f.point_gradient(gamma, p), field);
    }
    return s;
}

double rho_eta(const ClusterKernel& kernel, const Diffeomorphism& phi, const Point& x,
               const ClusterVector& y) {
    require(kernel.is_translation_gaussian(), "rho_eta: density unavailable for this kernel");
    if (phi.is_identity()) return 1.0;
    const Region supp = phi.support();
    bool touches = false;
    for (const auto& p : y)
        if (supp.contains(p)) {
            touches = true;
            break;
        }
    if (!touches) return 1.0;

    ClusterVector pre;
    pre.reserve(y.size());
    double jac = 1.0;
    for (const auto& p : y) {
        Point w = phi.inverse(p);
        jac *= phi.jacobian_det(w);
        pre.push_back(std::move(w));
    }
    const double log_ratio =
        cluster_log_density(kernel, x, pre) - cluster_log_density(kernel, x, y);
    return std::exp(log_ratio) / jac;
}

double rn_density(const ClusterKernel& kernel, const Diffeomorphism& phi,
                  const MarkedConfiguration& marked) {
    double r = 1.0;
    for (const auto& pair : marked.pairs) r *= rho_eta(kernel, phi, pair.centre, pair.cluster);
    return r;
}

PairedCheck qi_test(const ClusterProcessModel& model, const Diffeomorphism& phi,
                    const CylinderFunction& f, RandomStream& rng, std::size_t n) {
    require(n >= 2, "qi_test: need replicas");
    std::vector<double> lhs(n), rhs(n);
    run_replicas(n, rng, [&](std::size_t i, RandomStream& local) {
        const MarkedConfiguration marked = sample_marked(model, local);
        Configuration moved = project_uncropped(marked);
        Configuration plain = moved;
        for (auto& p : moved.points) p = phi.forward(p);
        lhs[i] = f.eval(moved);
        rhs[i] = f.eval(plain) * rn_density(model.kernel, phi, marked);
        return 0.0;
    });

    PairedCheck out;
    out.n = n;
    MeanAccumulator la, ra, diff;
    for (std::size_t i = 0; i < n; ++i) {
        la.add(lhs[i]);
        ra.add(rhs[i]);
        diff.add(lhs[i] - rhs[i]);
    }
    out.lhs = la.estimate();
    out.rhs = ra.estimate();
    const auto d = diff.estimate();
    out.z = d.std_error == 0.0 ? (d.value == 0.0 ? 0.0 : HUGE_VAL) : d.value / d.std_error;
    return out;
}

double beta_eta_v(const ClusterKernel& kernel, const Point& x, const ClusterVector& y,
                  const VectorField& v) {
    require(kernel.is_translation_gaussian(), "beta_eta_v: Gaussian route unavailable");
    const double inv_s2 = 1.0 / sqr(kernel.gaussian_sigma());
    double s = 0.0;
    for (const auto& p : y) {
        if (v.bump(p) == 0.0) continue;  // field and divergence both vanish
        s += dot((-inv_s2) * (p.x - x.x), v(p)) + v.divergence(p);
    }
    return s;
}

double beta_eta_v_pushforward(const ClusterKernel& kernel, const Point& x,
                              const ClusterVector& y, const VectorField& v) {
    require(kernel.placement.kind == PlacementMap::Kind::Translation,
            "beta_eta_v_pushforward: translation placements only");
    require(kernel.parent.component.has_log_density(),
            "beta_eta_v_pushforward: parent score unavailable");
    double s = 0.0;
    for (const auto& p : y) {
        if (v.bump(p) == 0.0) continue;
        // pull back through the placement: w = y - x, identity differential
        const Vec score = kernel.parent.component.log_density_gradient(p.x - x.x);
        s += dot(score, v(p)) + v.divergence(p);
    }
    return s;
}

double b_marked(const ClusterKernel& kernel, const MarkedConfiguration& marked,
                const VectorField& v) {
    double s = 0.0;
    for (const auto& pair : marked.pairs) s += beta_eta_v(kernel, pair.centre, pair.cluster, v);
    return s;
}

PairedCheck ibp_test(const ClusterProcessModel& model, const CylinderFunction& f,
                     const VectorField& v, RandomStream& rng, std::size_t n) {
    require(n >= 2, "ibp_test: need replicas");
    std::vector<double> grad_side(n), density_side(n);
    run_replicas(n, rng, [&](std::size_t i, RandomStream& local) {
        const MarkedConfiguration marked = sample_marked(model, local);
        const Configuration gamma = project_uncropped(marked);
        grad_side[i] = gamma_gradient(f, gamma, v);
        density_side[i] = -f.eval(gamma) * b_marked(model.kernel, marked, v);
        return 0.0;
    });

    PairedCheck out;
    out.n = n;
    MeanAccumulator la, ra, diff;
    for (std::size_t i = 0; i < n; ++i) {
        la.add(grad_side[i]);
        ra.add(density_side[i]);
        diff.add(grad_side[i] - density_side[i]);
    }
    out.lhs = la.estimate();
    out.rhs = ra.estimate();
    const auto d = diff.estimate();
    out.z = d.std_error == 0.0 ? (d.value == 0.0 ? 0.0 : HUGE_VAL) : d.value / d.std_error;
    return out;
}

PairedCheck ibp_test_general(const ClusterProcessModel& model, const CylinderFunction& f1,
                             const CylinderFunction& f2, const CylinderVectorField& field,
                             RandomStream& rng, std::size_t n) {
    require(field.coefficients.size() == field.fields.size(),
            "ibp_test_general: one coefficient per field");
    require(n >= 2, "ibp_test_general: need replicas");
    const std::size_t k = field.fields.size();

    std::vector<double> lhs(n), rhs(n);
    run_replicas(n, rng, [&](std::size_t i, RandomStream& local) {
        const MarkedConfiguration marked = sample_marked(model, local);
        const Configuration gamma = project_uncropped(marked);
        const double f1v = f1.eval(gamma);
        const double f2v = f2.eval(gamma);

        double grad1 = 0.0, grad2 = 0.0, bv = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double gj = field.coefficients[j].eval(gamma);
            grad1 += gj * gamma_gradient(f1, gamma, field.fields[j]);
            grad2 += gj * gamma_gradient(f2, gamma, field.fields[j]);
            bv += gj * b_marked(model.kernel, marked, field.fields[j]) +
                  gamma_gradient(field.coefficients[j], gamma, field.fields[j]);
        }
        lhs[i] = grad1 * f2v;
        rhs[i] = -f1v * grad2 - f1v * f2v * bv;
        return 0.0;
    });

    PairedCheck out;
    out.n = n;
    MeanAccumulator la, ra, diff;
    for (std::size_t i = 0; i < n; ++i) {
        la.add(lhs[i]);
        ra.add(rhs[i]);
        diff.add(lhs[i] - rhs[i]);
    }
    out.lhs = la.estimate();
    out.rhs = ra.estimate();
    const auto d = diff.estimate();
    out.z = d.std_error == 0.0 ? (d.value == 0.0 ? 0.0 : HUGE_VAL) : d.value / d.std_error;
    return out;
}

}  // namespace cpm
