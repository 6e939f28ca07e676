#pragma once

#include <functional>

#include "cpm/functions.hpp"
#include "cpm/process.hpp"

namespace cpm {

/// <f, gamma> = sum of f over the points of gamma, with multiplicity.
double pair_functional(const TestFunction& f, const Configuration& gamma);

/// Mean and standard error of exp(-<f, gamma>) over the samples.
EstimateWithError empirical_laplace(const std::vector<Configuration>& samples,
                                    const TestFunction& f);

/// Laplace transform of the cluster process from its centre law and kernel:
/// closed form exp(-integral of (1 - G_x(f)) d theta) for Poisson centres
/// (outer integral by stratified Monte Carlo over the dilated window, inner
/// G_x(f) by n_inner cluster draws per node), finite product over the fixed
/// configuration for lattice centres.  Gibbs centres have no closed form and
/// are rejected.
EstimateWithError cluster_laplace_theoretical(const ClusterProcessModel& model,
                                              const TestFunction& f, RandomStream& rng,
                                              std::size_t n_outer, std::size_t n_inner);

/// Mean and standard error of |<f, gamma>|^order, order in {1,2,3,4}.
EstimateWithError moment_estimate(const std::vector<Configuration>& samples,
                                  const TestFunction& f, int order);

/// Symmetric test function of one or two points.
struct SymmetricFunction {
    std::function<double(const Point&)> unary;
    std::function<double(const Point&, const Point&)> binary;
};

/// Empirical factorial-moment functional against its integral form with a
/// known constant correlation value (Poisson: 1); orders 1 and 2.
struct CorrelationCheck {
    EstimateWithError lhs;  // empirical sum over point tuples
    EstimateWithError rhs;  // (1/n!) integral of phi * kappa w.r.t. theta^n
    double z = 0.0;
};
CorrelationCheck correlation_identity_check(const std::vector<Configuration>& samples,
                                            const SymmetricFunction& phi,
                                            double correlation_value,
                                            const ReferenceMeasure& theta, int order,
                                            RandomStream& rng, std::size_t n_mc = 1 << 16);

}  // namespace cpm
