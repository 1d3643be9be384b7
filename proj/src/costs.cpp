#include "stratclass/costs.hpp"

#include <cmath>
#include <sstream>

namespace stratclass {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

void check_dim(const Eigen::VectorXd& v, int dim, const char* name) {
  if (static_cast<int>(v.size()) != dim) {
    std::ostringstream msg;
    msg << name << " has size " << v.size() << ", expected " << dim;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

double lp_norm(const Eigen::VectorXd& v, double p) {
  if (std::isnan(p) || p < 1.0) throw InvalidExponent("lp_norm requires p >= 1");
  if (v.size() == 0) return 0.0;
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    acc += std::pow(std::abs(v(i)) / m, p);
  return m * std::pow(acc, 1.0 / p);
}

double dual_exponent(double p) {
  if (std::isnan(p) || p < 1.0)
    throw InvalidExponent("dual_exponent requires p >= 1");
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

CostSpec make_cost_spec(double p, double r, const Eigen::MatrixXd& A,
                        double eps) {
  if (std::isnan(p) || p < 1.0)
    throw InvalidExponent("cost norm exponent p must satisfy p >= 1");
  if (!std::isfinite(r) || r < 1.0)
    throw InvalidExponent("cost power r must be finite and >= 1");
  if (!std::isfinite(eps) || eps <= 0.0)
    throw std::invalid_argument("singular-value margin eps must be positive");
  if (A.rows() != A.cols() || A.rows() == 0)
    throw std::invalid_argument("transform A must be square and nonempty");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double sigma_min = svd.singularValues().minCoeff();
  if (!(sigma_min >= eps)) {
    std::ostringstream msg;
    msg << "transform is within the singularity margin: sigma_min = "
        << sigma_min << " < eps = " << eps;
    throw SingularTransform(msg.str());
  }

  CostSpec spec;
  spec.p = p;
  spec.q = dual_exponent(p);
  spec.r = r;
  spec.s = (r == 1.0) ? kInf : r / (r - 1.0);
  spec.eps = eps;
  spec.A = A;
  // (A^T)^{-1} from the SVD: A = U S V^T  =>  (A^T)^{-1} = U S^{-1} V^T.
  spec.B = svd.matrixU() *
           svd.singularValues().cwiseInverse().asDiagonal() *
           svd.matrixV().transpose();
  spec.sigma_min = sigma_min;
  spec.dim = static_cast<int>(A.rows());

  const double inv_err =
      (spec.B * A.transpose() -
       Eigen::MatrixXd::Identity(spec.dim, spec.dim))
          .cwiseAbs()
          .maxCoeff();
  if (!(inv_err <= 1e-9)) {
    std::ostringstream msg;
    msg << "cached inverse fails B A^T = I check: max deviation " << inv_err;
    throw SingularTransform(msg.str());
  }
  return spec;
}

double cost_value(const CostSpec& spec, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& xhat) {
  check_dim(x, spec.dim, "x");
  check_dim(xhat, spec.dim, "xhat");
  const double nrm = lp_norm(spec.A * (xhat - x), spec.p);
  return std::pow(nrm, spec.r) / spec.r;
}

double conjugate_value(const CostSpec& spec, const Eigen::VectorXd& beta) {
  check_dim(beta, spec.dim, "beta");
  if (spec.r == 1.0)
    throw DegenerateDegree(
        "conjugate has no finite power form for r == 1 (indicator of the "
        "dual unit ball)");
  const double nrm = lp_norm(spec.B * beta, spec.q);
  return std::pow(nrm, spec.s) / spec.s;
}

Eigen::VectorXd conjugate_subgradient(const CostSpec& spec,
                                      const Eigen::VectorXd& beta) {
  check_dim(beta, spec.dim, "beta");
  if (spec.r == 1.0)
    throw DegenerateDegree("conjugate subgradient undefined for r == 1");

  const Eigen::VectorXd u = spec.B * beta;
  const int d = spec.dim;
  if (u.cwiseAbs().maxCoeff() == 0.0) return Eigen::VectorXd::Zero(d);

  Eigen::VectorXd w(d);
  if (std::isinf(spec.q)) {
    // All mass on the first coordinate attaining the max modulus.
    int j = 0;
    double best = std::abs(u(0));
    for (int i = 1; i < d; ++i) {
      const double a = std::abs(u(i));
      if (a > best) {
        best = a;
        j = i;
      }
    }
    w.setZero();
    w(j) = sign(u(j)) * std::pow(best, spec.s - 1.0);
  } else if (spec.q == 1.0) {
    const double n1 = u.cwiseAbs().sum();
    const double scale = std::pow(n1, spec.s - 1.0);
    for (int i = 0; i < d; ++i) w(i) = scale * sign(u(i));
  } else if (spec.q == 2.0) {
    w = std::pow(u.norm(), spec.s - 2.0) * u;
  } else {
    const double nq = lp_norm(u, spec.q);
    const double scale = std::pow(nq, spec.s - spec.q);
    for (int i = 0; i < d; ++i)
      w(i) = scale * sign(u(i)) * std::pow(std::abs(u(i)), spec.q - 1.0);
  }
  return spec.B.transpose() * w;
}

BestResponse best_response(const CostSpec& spec, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& beta) {
  check_dim(x, spec.dim, "x");
  check_dim(beta, spec.dim, "beta");

  if (spec.r == 1.0) {
    // Linear cost: staying put is optimal while the offered weights sit
    // inside the dual unit ball; beyond it the utility grows without bound.
    const double dual = lp_norm(spec.B * beta, spec.q);
    if (dual > 1.0) {
      std::ostringstream msg;
      msg << "r == 1 response unbounded: dual norm " << dual << " exceeds 1";
      throw UnboundedResponse(msg.str());
    }
    return {x, x.dot(beta)};
  }

  BestResponse out;
  out.xhat = x + conjugate_subgradient(spec, beta);
  out.inner = x.dot(beta) + spec.s * conjugate_value(spec, beta);
  return out;
}

}  // namespace stratclass
