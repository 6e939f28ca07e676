#pragma once

#include "cpm/functions.hpp"
#include "cpm/process.hpp"

namespace cpm {

/// Cylinder function F(gamma) = outer(<phi_1,gamma>, ..., <phi_k,gamma>)
/// with a smooth bounded outer function and smooth compactly supported inner
/// test functions.  Locality comes for free: points outside the inner
/// supports contribute nothing.
struct CylinderFunction {
    enum class Outer { Linear, ExpNeg };

    Outer outer = Outer::Linear;
    Vec weights;
    double bias = 0.0;
    std::vector<TestFunction> inner;  // SmoothBump kind

    static CylinderFunction linear(std::vector<TestFunction> inner, Vec weights,
                                   double bias = 0.0);
    /// exp(-(bias + sum weights_j <phi_j, gamma>)).
    static CylinderFunction exp_neg(std::vector<TestFunction> inner, Vec weights,
                                    double bias = 0.0);
    static CylinderFunction constant(double c);

    double eval(const Configuration& gamma) const;
    /// Spatial gradient of F at one point of gamma.
    Vec point_gradient(const Configuration& gamma, const Point& p) const;

private:
    Vec arguments(const Configuration& gamma) const;
    Vec outer_partials(const Vec& u) const;
};

/// Directional derivative sum_{x in gamma} grad_x F(gamma) . v(x).
double gamma_gradient(const CylinderFunction& f, const Configuration& gamma,
                      const VectorField& v);

/// Radon-Nikodym density of the diffeomorphism-moved cluster law against the
/// original at one mark: h_x(phibar^{-1} y)/h_x(y) times the inverse Jacobian
/// of the diagonal map, the Jacobian factors evaluated at the preimages so
/// that the density integrates to one exactly.
double rho_eta(const ClusterKernel& kernel, const Diffeomorphism& phi, const Point& x,
               const ClusterVector& y);

/// Density for the whole marked configuration: product of rho_eta over pairs.
/// Pairs whose clusters miss the support of phi contribute exactly 1.
double rn_density(const ClusterKernel& kernel, const Diffeomorphism& phi,
                  const MarkedConfiguration& marked);

struct PairedCheck {
    EstimateWithError lhs;
    EstimateWithError rhs;
    double z = 0.0;  // paired z-score of the per-sample differences
    std::size_t n = 0;
};

/// Quasi-invariance test: E F(phi(projection)) against E F(projection) * R.
PairedCheck qi_test(const ClusterProcessModel& model, const Diffeomorphism& phi,
                    const CylinderFunction& f, RandomStream& rng, std::size_t n);

/// Logarithmic derivative of the cluster law at (x, y) along the lifted
/// field: sum_i beta_i . v(y_i) + sum_i div v(y_i), with beta the Gaussian
/// score -(y_i - x)/sigma^2.
double beta_eta_v(const ClusterKernel& kernel, const Point& x, const ClusterVector& y,
                  const VectorField& v);

/// Same quantity through the parent-space form: pulls the field back through
/// the placement (translation placements: identity differential) and uses the
/// parent component score.  Agrees with beta_eta_v to machine precision for
/// translation-Gaussian kernels.
double beta_eta_v_pushforward(const ClusterKernel& kernel, const Point& x,
                              const ClusterVector& y, const VectorField& v);

/// Sum of beta_eta_v over the pairs of a marked configuration.
double b_marked(const ClusterKernel& kernel, const MarkedConfiguration& marked,
                const VectorField& v);

/// Integration-by-parts residual test: E grad_v F = -E F * B.
PairedCheck ibp_test(const ClusterProcessModel& model, const CylinderFunction& f,
                     const VectorField& v, RandomStream& rng, std::size_t n);

/// Cylinder vector field V(gamma)_x = sum_j G_j(gamma) v_j(x).
struct CylinderVectorField {
    std::vector<CylinderFunction> coefficients;
    std::vector<VectorField> fields;
};

/// Product-rule IBP: E sum grad F1 . V F2 = -E F1 sum grad F2 . V - E F1 F2 B^V.
PairedCheck ibp_test_general(const ClusterProcessModel& model, const CylinderFunction& f1,
                             const CylinderFunction& f2, const CylinderVectorField& field,
                             RandomStream& rng, std::size_t n);

}  // namespace cpm
