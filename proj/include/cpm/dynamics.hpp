#pragma once

#include "cpm/functions.hpp"
#include "cpm/process.hpp"

namespace cpm {

/// Euler-Maruyama parameters for the cluster-point Langevin motion.  Cluster
/// points move with drift given by the kernel's logarithmic derivative and
/// unit diffusion pair; centres never move (the underlying calculus
/// differentiates along cluster directions only).  Positions wrap on the
/// periodic box.
struct DynamicsConfig {
    double time_step = 1e-4;
    std::size_t n_steps = 1000;
    std::size_t stride = 10;  // thinning of the recorded series
    Window box;               // periodic boundary (box windows, flat backend)
};

/// One Euler-Maruyama step: y <- y + beta(x,y) dt + sqrt(2 dt) xi.
/// Rejects time steps violating dt <= 0.01 sigma^2 for Gaussian kernels.
MarkedConfiguration langevin_step(const MarkedConfiguration& state, const ClusterKernel& kernel,
                                  const DynamicsConfig& cfg, RandomStream& rng);

/// Exact one-step transition of the single-point Ornstein-Uhlenbeck case
/// (bias oracle for the Euler scheme): mean reversion to the centre with
/// rate 1/sigma^2 and stationary variance sigma^2 per coordinate.
Point ou_exact_step(const Point& centre, const Point& y, double sigma, double dt,
                    RandomStream& rng);

struct StationarityResult {
    std::vector<double> times;
    std::vector<double> means;      // cross-replica mean of <f, gamma_t>
    std::vector<double> std_errors;
    SlopeFit drift;                 // least-squares slope of the series
};

/// Equilibrium-start stationarity diagnostic: replicas of the dynamics from
/// fresh marked samples, the time series of mean <f, projection(gamma_t)>,
/// and the z-score of its drift against zero.
StationarityResult stationarity_test(const ClusterProcessModel& model, const DynamicsConfig& cfg,
                                     const TestFunction& f, RandomStream& rng,
                                     std::size_t n_replicas);

}  // namespace cpm
