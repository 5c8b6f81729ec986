#include "w3cert/sdpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace w3cert {

namespace {

struct Certificate {
  double bound = -std::numeric_limits<double>::infinity();
  double r_inf = std::numeric_limits<double>::infinity();
};

// The problem in solver form, with box rows scaled to unit norm.
class Workspace {
 public:
  explicit Workspace(const SdpProblem& p) : t_(*p.moment_template) {
    n_ = static_cast<Eigen::Index>(t_.size());
    m_ = static_cast<Eigen::Index>(t_.variable_count()) - 1;
    c0_ = p.objective.constant;
    c_ = RealVector::Zero(m_);
    for (const auto& [id, v] : p.objective.coeffs) c_(id - 1) = v;
    size_ = RealVector(m_);
    for (Eigen::Index k = 0; k < m_; ++k) size_(k) = t_.class_sizes()[static_cast<std::size_t>(k + 1)];

    const auto nc = static_cast<Eigen::Index>(p.constraints.size());
    S_ = RealMatrix::Zero(nc, m_);
    s0_ = RealVector(nc);
    lo_ = RealVector(nc);
    hi_ = RealVector(nc);
    for (Eigen::Index i = 0; i < nc; ++i) {
      const auto& bc = p.constraints[static_cast<std::size_t>(i)];
      for (const auto& [id, v] : bc.expr.coeffs) S_(i, id - 1) = v;
      double d = S_.row(i).norm();
      if (d == 0.0) d = 1.0;
      S_.row(i) /= d;
      s0_(i) = bc.expr.constant / d;
      lo_(i) = bc.lower / d;
      hi_(i) = bc.upper / d;
    }

    class_rows_.resize(static_cast<std::size_t>(m_));
    class_cols_.resize(static_cast<std::size_t>(m_));
    const auto& cells = t_.cells();
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
      const int v = cells[idx];
      if (v == 0) continue;
      class_rows_[static_cast<std::size_t>(v - 1)].push_back(static_cast<int>(idx / static_cast<std::size_t>(n_)));
      class_cols_[static_cast<std::size_t>(v - 1)].push_back(static_cast<int>(idx % static_cast<std::size_t>(n_)));
    }
  }

  [[nodiscard]] Eigen::Index n() const { return n_; }
  [[nodiscard]] Eigen::Index m() const { return m_; }
  [[nodiscard]] Eigen::Index nc() const { return S_.rows(); }

  // E * diag_value + sum_k x_k B_k
  [[nodiscard]] RealMatrix fill(const RealVector& x, double diag_value) const {
    RealMatrix out(n_, n_);
    const auto& cells = t_.cells();
    double* data = out.data();  // column-major; cells is symmetric so order is irrelevant
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
      const int v = cells[idx];
      data[idx] = v == 0 ? diag_value : x(v - 1);
    }
    return out;
  }

  // <V, B_k> for every k
  [[nodiscard]] RealVector gather(const RealMatrix& v) const {
    RealVector g = RealVector::Zero(m_);
    const auto& cells = t_.cells();
    const double* data = v.data();
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
      const int k = cells[idx];
      if (k != 0) g(k - 1) += data[idx];
    }
    return g;
  }

  void factor(double sigma, double rho_m, double rho_b) {
    dinv_ = (RealVector::Constant(m_, sigma) + rho_m * size_).cwiseInverse();
    if (nc() > 0) {
      RealMatrix small = RealMatrix::Identity(nc(), nc()) / rho_b + S_ * dinv_.asDiagonal() * S_.transpose();
      small_ = small.ldlt();
    }
  }

  [[nodiscard]] RealVector solve_kkt(const RealVector& rhs) const {
    RealVector y = dinv_.cwiseProduct(rhs);
    if (nc() == 0) return y;
    const RealVector w = small_.solve(S_ * y);
    return y - dinv_.cwiseProduct(S_.transpose() * w);
  }

  // Z: PSD multiplier of the moment matrix, lambda: box multipliers.
  [[nodiscard]] Certificate certificate(const RealMatrix& z_in, const RealVector& lambda) const {
    const RealMatrix Z = 0.5 * (z_in + z_in.transpose());
    double box_part = 0.0;
    for (Eigen::Index i = 0; i < nc(); ++i) {
      box_part += lambda(i) * s0_(i) - std::max(lambda(i) * lo_(i), lambda(i) * hi_(i));
    }
    const RealVector st_lambda = nc() > 0 ? RealVector(S_.transpose() * lambda) : RealVector::Zero(m_);

    Certificate out;
    // Projected multiplier, residual paid in l1.
    {
      const RealMatrix zp = psd_project(Z);
      const RealVector r = c_ - gather(zp) + st_lambda;
      const double b = c0_ - zp.trace() + box_part - r.lpNorm<1>();
      if (b > out.bound) out = {b, r.lpNorm<Eigen::Infinity>()};
    }
    // Residual absorbed into Z, then shifted to PSD.
    {
      const RealVector r = c_ - gather(Z) + st_lambda;
      const RealVector per_cell = r.cwiseQuotient(size_);
      RealMatrix zc = Z + fill(per_cell, 0.0);
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(zc, Eigen::EigenvaluesOnly);
      const double shift = std::max(0.0, -es.eigenvalues()(0));
      const double b = c0_ - zc.trace() - shift * static_cast<double>(n_) + box_part;
      if (b > out.bound) out = {b, r.lpNorm<Eigen::Infinity>()};
    }
    return out;
  }

  // H_kl = <B_k, X B_l Y> for symmetric X, Y.
  [[nodiscard]] RealMatrix schur(const RealMatrix& X, const RealMatrix& Y) const {
    RealMatrix H(m_, m_);
    RealMatrix T(n_, n_);
    for (Eigen::Index k = 0; k < m_; ++k) {
      const auto& rows = class_rows_[static_cast<std::size_t>(k)];
      const auto& cols = class_cols_[static_cast<std::size_t>(k)];
      const RealMatrix xi = X(Eigen::all, rows);
      const RealMatrix yj = Y(cols, Eigen::all);
      T.noalias() = xi * yj;
      H.col(k) = gather(T);
    }
    return 0.5 * (H + H.transpose());
  }

  [[nodiscard]] double objective(const RealVector& x) const { return c0_ + c_.dot(x); }
  [[nodiscard]] double trivial_upper() const { return c0_ + c_.lpNorm<1>(); }

  const RealVector& c() const { return c_; }
  const RealMatrix& S() const { return S_; }
  const RealVector& s0() const { return s0_; }
  const RealVector& lo() const { return lo_; }
  const RealVector& hi() const { return hi_; }

 private:
  const MomentMatrixTemplate& t_;
  Eigen::Index n_ = 0;
  Eigen::Index m_ = 0;
  double c0_ = 0.0;
  RealVector c_;
  RealVector size_;
  RealMatrix S_;
  RealVector s0_, lo_, hi_;
  RealVector dinv_;
  Eigen::LDLT<RealMatrix> small_;
  std::vector<std::vector<int>> class_rows_, class_cols_;
};

// Largest a in (0, cap] with M + a dM PSD.
double max_step(const RealMatrix& M, const RealMatrix& dM, double cap) {
  Eigen::LLT<RealMatrix> llt(M);
  if (llt.info() != Eigen::Success) return 0.0;
  RealMatrix t = llt.matrixL().solve(dM);
  t = llt.matrixL().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0.0 ? cap : std::min(cap, -1.0 / lmin);
}

double max_step(const RealVector& v, const RealVector& dv, double cap) {
  double a = cap;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  }
  return a;
}

RealMatrix sym(const RealMatrix& a) { return 0.5 * (a + a.transpose()); }

// Primal-dual interior point (HKM direction, Mehrotra predictor-corrector)
// on the pair
//   min c.y  s.t.  S(y) = C0 + sum_k y_k A_k >= 0
//   max -<C0, X> s.t. <A_k, X> = c_k, X >= 0
// where block 1 is the moment matrix and block 2 holds the box slacks
// (row 2i: lower side, row 2i+1: upper side).
SdpSolution solve_ipm(const SdpProblem& p, const SolverSettings& st, Workspace& w) {
  const Eigen::Index n = w.n();
  const Eigen::Index m = w.m();
  const Eigen::Index nc = w.nc();
  const Eigen::Index nl = 2 * nc;

  RealMatrix A2(nl, m);
  RealVector c2(nl);
  for (Eigen::Index i = 0; i < nc; ++i) {
    A2.row(2 * i) = w.S().row(i);
    A2.row(2 * i + 1) = -w.S().row(i);
    c2(2 * i) = w.s0()(i) - w.lo()(i);
    c2(2 * i + 1) = w.hi()(i) - w.s0()(i);
  }
  auto lambda_of = [&](const RealVector& x2) {
    RealVector l(nc);
    for (Eigen::Index i = 0; i < nc; ++i) l(i) = x2(2 * i + 1) - x2(2 * i);
    return l;
  };

  RealVector y = RealVector::Zero(m);
  RealMatrix X1 = RealMatrix::Identity(n, n);
  RealMatrix S1 = RealMatrix::Identity(n, n);
  RealVector x2 = RealVector::Ones(nl);
  RealVector s2 = c2.cwiseMax(1.0);
  const double dim = static_cast<double>(n + nl);
  const double cnorm = 1.0 + w.c().lpNorm<Eigen::Infinity>();

  SdpSolution sol;
  Certificate best;
  int best_it = 0;
  int it = 0;
  for (it = 1; it <= st.ipm_max_iterations; ++it) {
    const RealMatrix Rd1 = w.fill(y, 1.0) - S1;
    const RealVector Rd2 = c2 + A2 * y - s2;
    const RealVector rp = w.c() - w.gather(X1) - A2.transpose() * x2;
    const double mu = (X1.cwiseProduct(S1).sum() + x2.dot(s2)) / dim;

    const double pobj = w.objective(y);
    const double dobj = w.objective(RealVector::Zero(m)) - X1.trace() - c2.dot(x2);
    const double pinf = std::max(Rd1.cwiseAbs().maxCoeff(), nl ? Rd2.lpNorm<Eigen::Infinity>() : 0.0);
    const double dinf = rp.lpNorm<Eigen::Infinity>() / cnorm;
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    const auto cert = w.certificate(X1, lambda_of(x2));
    if (cert.bound > best.bound) {
      best = cert;
      best_it = it;
    }
    if (st.verbose) {
      std::fprintf(stderr, "ipm %3d mu %.2e pobj %.10f dobj %.10f pinf %.1e dinf %.1e bound %.10f\n", it, mu, pobj,
                   dobj, pinf, dinf, cert.bound);
    }
    if (best.bound > w.trivial_upper() + 1e-9) {
      sol.status = SolveStatus::InfeasibleDetected;
      break;
    }
    const bool tight = pinf <= st.ipm_tolerance && std::abs(pobj - best.bound) <= 0.1 * st.tolerance;
    if (tight || (pinf <= st.ipm_tolerance && dinf <= st.ipm_tolerance && gap <= st.ipm_tolerance)) {
      sol.status = SolveStatus::Converged;
      break;
    }
    // Degenerate problems (eps = 0) never reach the tolerances; stop once
    // the certificate has stopped improving.
    if (it - best_it >= st.ipm_stall_iterations) {
      if (pinf <= st.tolerance && pobj - best.bound <= 10.0 * st.tolerance) sol.status = SolveStatus::Converged;
      break;
    }

    Eigen::LLT<RealMatrix> sllt(S1);
    if (sllt.info() != Eigen::Success) break;
    const RealMatrix Sinv = sllt.solve(RealMatrix::Identity(n, n));
    const RealVector s2inv = s2.cwiseInverse();

    RealMatrix H = w.schur(X1, Sinv);
    if (nl) H += A2.transpose() * (x2.cwiseProduct(s2inv)).asDiagonal() * A2;
    Eigen::LLT<RealMatrix> hllt(H);
    for (double reg = 1e-14 * (1.0 + H.diagonal().maxCoeff()); hllt.info() != Eigen::Success; reg *= 100.0) {
      hllt.compute(H + reg * RealMatrix::Identity(m, m));
    }

    struct Direction {
      RealVector dy;
      RealMatrix dX1, dS1;
      RealVector dx2, ds2;
    };
    auto direction = [&](double target, const RealMatrix* corr1, const RealVector* corr2) {
      RealMatrix G1 = target * Sinv - X1 - X1 * Rd1 * Sinv;
      RealVector g2 = target * s2inv - x2 - x2.cwiseProduct(Rd2).cwiseProduct(s2inv);
      if (corr1) G1 -= *corr1;
      if (corr2) g2 -= *corr2;
      const RealVector rhs = w.gather(G1) + A2.transpose() * g2 - rp;
      Direction d;
      d.dy = hllt.solve(rhs);
      // Iterative refinement against <A_k, dX> = rp_k, which the Schur
      // solve only meets approximately once X and S^-1 are badly scaled.
      for (int pass = 0; pass <= st.ipm_refinement; ++pass) {
        d.dS1 = Rd1 + w.fill(d.dy, 0.0);
        d.ds2 = Rd2 + A2 * d.dy;
        RealMatrix dx = target * Sinv - X1 - X1 * d.dS1 * Sinv;
        if (corr1) dx -= *corr1;
        d.dX1 = sym(dx);
        d.dx2 = target * s2inv - x2 - x2.cwiseProduct(d.ds2).cwiseProduct(s2inv);
        if (corr2) d.dx2 -= *corr2;
        if (pass == st.ipm_refinement) break;
        const RealVector err = w.gather(d.dX1) + A2.transpose() * d.dx2 - rp;
        d.dy += hllt.solve(err);
      }
      return d;
    };
    auto steps = [&](const Direction& d, double frac) {
      const double ap = std::min(max_step(X1, d.dX1, 1.0 / frac), max_step(x2, d.dx2, 1.0 / frac)) * frac;
      const double ad = std::min(max_step(S1, d.dS1, 1.0 / frac), max_step(s2, d.ds2, 1.0 / frac)) * frac;
      return std::pair{std::min(ap, 1.0), std::min(ad, 1.0)};
    };

    const auto aff = direction(0.0, nullptr, nullptr);
    const auto [ap_aff, ad_aff] = steps(aff, 1.0);
    const double mu_aff = ((X1 + ap_aff * aff.dX1).cwiseProduct(S1 + ad_aff * aff.dS1).sum() +
                           (x2 + ap_aff * aff.dx2).dot(s2 + ad_aff * aff.ds2)) / dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
    const RealMatrix corr1 = aff.dX1 * aff.dS1 * Sinv;
    const RealVector corr2 = aff.dx2.cwiseProduct(aff.ds2).cwiseProduct(s2inv);
    const auto d = direction(sigma * mu, &corr1, &corr2);
    const auto [ap, ad] = steps(d, 0.95);
    if (ap < 1e-12 && ad < 1e-12) break;

    X1 = sym(X1 + ap * d.dX1);
    x2 += ap * d.dx2;
    y += ad * d.dy;
    S1 = sym(S1 + ad * d.dS1);
    s2 += ad * d.ds2;
  }
  sol.iterations = std::min(it, st.ipm_max_iterations);
  sol.bound = best.bound;
  sol.dual_residual = best.r_inf;
  sol.moments.assign(static_cast<std::size_t>(m + 1), 1.0);
  for (Eigen::Index k = 0; k < m; ++k) sol.moments[static_cast<std::size_t>(k + 1)] = y(k);
  sol.primal_objective = w.objective(y);
  sol.primal_residual = check_certificate(p, sol.moments).worst_violation;
  return sol;
}

double inf_norm(const RealMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iter";
    case SolveStatus::InfeasibleDetected: return "infeasible-detected";
  }
  return "unknown";
}

RealMatrix psd_project(const RealMatrix& s) {
  const RealMatrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const Eigen::Index n = vals.size();
  Eigen::Index neg = 0;
  while (neg < n && vals(neg) < 0.0) ++neg;
  if (neg == 0) return sym;
  if (neg == n) return RealMatrix::Zero(n, n);
  // Build from whichever side has fewer eigenvectors.
  if (neg <= n - neg) {
    const auto q = vecs.leftCols(neg);
    RealMatrix out = sym - q * vals.head(neg).asDiagonal() * q.transpose();
    return 0.5 * (out + out.transpose());
  }
  const auto q = vecs.rightCols(n - neg);
  RealMatrix out = q * vals.tail(n - neg).asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

SdpSolution solve(const SdpProblem& p, const SolverSettings& st) {
  if (st.method == SolverMethod::InteriorPoint) {
    if (st.ipm_max_iterations < 1 || !(st.ipm_tolerance > 0.0)) throw std::invalid_argument("solve: invalid solver settings");
    Workspace w(p);
    return solve_ipm(p, st, w);
  }
  if (st.max_iterations < 1 || !(st.tolerance > 0.0) || !(st.alpha > 0.0 && st.alpha < 2.0) || !(st.rho > 0.0)) {
    throw std::invalid_argument("solve: invalid solver settings");
  }
  Workspace w(p);
  const Eigen::Index n = w.n();
  const Eigen::Index m = w.m();
  const Eigen::Index nc = w.nc();

  double rho = st.rho;
  auto rho_box = [&] { return rho * st.box_rho_scale; };
  w.factor(st.sigma, rho, rho_box());

  RealVector x = RealVector::Zero(m);
  RealMatrix s1 = RealMatrix::Identity(n, n);
  RealVector s2 = w.s0().cwiseMax(w.lo()).cwiseMin(w.hi());
  RealMatrix z1 = RealMatrix::Zero(n, n);
  RealVector z2 = RealVector::Zero(nc);

  SdpSolution sol;
  Certificate best;
  const double alpha = st.alpha;
  int it = 0;
  bool converged = false;
  for (it = 1; it <= st.max_iterations; ++it) {
    const RealVector rhs = st.sigma * x - w.c() + w.gather(rho * s1 - z1) +
                           (nc > 0 ? RealVector(w.S().transpose() * (rho_box() * (s2 - w.s0()) - z2))
                                   : RealVector::Zero(m));
    const RealVector xt = w.solve_kkt(rhs);
    const RealMatrix st1 = w.fill(xt, 1.0);
    const RealVector st2 = w.S() * xt + w.s0();

    x = alpha * xt + (1.0 - alpha) * x;
    const RealMatrix h1 = alpha * st1 + (1.0 - alpha) * s1;
    const RealVector h2 = alpha * st2 + (1.0 - alpha) * s2;
    s1 = psd_project(h1 + z1 / rho);
    s2 = (h2 + z2 / rho_box()).cwiseMax(w.lo()).cwiseMin(w.hi());
    z1 += rho * (h1 - s1);
    z2 += rho_box() * (h2 - s2);

    const bool check = it % st.check_interval == 0 || it == st.max_iterations;
    if (it % 10 != 0 && !check) continue;

    const RealMatrix mx = w.fill(x, 1.0);
    const RealVector sx = w.S() * x + w.s0();
    const double r_prim = std::max(inf_norm(mx - s1), nc > 0 ? inf_norm(sx - s2) : 0.0);
    const RealVector gz = w.gather(z1);
    const RealVector stz = nc > 0 ? RealVector(w.S().transpose() * z2) : RealVector::Zero(m);
    const double r_dual = inf_norm(w.c() + gz + stz);
    const double scale_p = std::max({1.0, inf_norm(s1), nc > 0 ? inf_norm(sx) : 0.0});
    const double scale_d = std::max({inf_norm(w.c()), inf_norm(gz), inf_norm(stz), 1e-12});
    converged = r_prim <= st.tolerance * (1.0 + scale_p) && r_dual <= st.tolerance * (1.0 + scale_d);

    if (check || converged) {
      const auto cert = w.certificate(-z1, z2);
      if (cert.bound > best.bound) best = cert;
      if (best.bound > w.trivial_upper() + 1e-9) {
        sol.status = SolveStatus::InfeasibleDetected;
        break;
      }
      if (st.adaptive_rho && !converged) {
        const double ratio = std::sqrt((r_prim / scale_p) / std::max(r_dual / scale_d, 1e-300));
        if (ratio > 5.0 || ratio < 0.2) {
          rho = std::clamp(rho * ratio, 1e-6, 1e6);
          w.factor(st.sigma, rho, rho_box());
        }
      }
    }
    if (converged) {
      sol.status = SolveStatus::Converged;
      break;
    }
  }
  sol.iterations = std::min(it, st.max_iterations);
  sol.bound = best.bound;
  sol.dual_residual = best.r_inf;
  sol.moments.assign(static_cast<std::size_t>(m + 1), 1.0);
  for (Eigen::Index k = 0; k < m; ++k) sol.moments[static_cast<std::size_t>(k + 1)] = x(k);
  sol.primal_objective = w.objective(x);
  sol.primal_residual = check_certificate(p, sol.moments).worst_violation;
  return sol;
}

CertificateReport check_certificate(const SdpProblem& p, const std::vector<double>& moments) {
  const auto& t = *p.moment_template;
  if (moments.size() != t.variable_count()) throw std::invalid_argument("check_certificate: moment count mismatch");
  CertificateReport rep;
  for (const auto& c : p.constraints) {
    const double v = c.expr.evaluate(moments);
    rep.box_violations.push_back(std::max({0.0, c.lower - v, v - c.upper}));
  }
  const RealMatrix mm = t.matrix(moments);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(mm, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues()(0);
  rep.worst_violation = std::max(0.0, -rep.min_eigenvalue);
  for (double v : rep.box_violations) rep.worst_violation = std::max(rep.worst_violation, v);
  rep.objective = p.objective.evaluate(moments);
  return rep;
}

}  // namespace w3cert
