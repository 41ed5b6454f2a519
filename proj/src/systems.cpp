#include "sparseid/systems.hpp"

#include "sparseid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sparseid {

namespace {

// Dormand-Prince 5(4) tableau, error weights (b - b_hat) and the dense
// output polynomial coefficients of the 4th-order continuous extension.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                 a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                 e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

double error_norm(const Vector& err, const Vector& y0, const Vector& y1,
                  double rtol, double atol) {
  const Vector scale =
      (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
  return std::sqrt((err.array() / scale.array()).square().mean());
}

double initial_step(const OdeSystem& sys, double t0, const Vector& x0,
                    const Vector& f0, double rtol, double atol, double span) {
  const Vector scale = (atol + rtol * x0.cwiseAbs().array()).matrix();
  const double d0 = std::sqrt((x0.array() / scale.array()).square().mean());
  const double d1n = std::sqrt((f0.array() / scale.array()).square().mean());
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, span);
  const Vector x1 = x0 + h0 * f0;
  const Vector f1 = sys.evaluate(t0 + h0, x1);
  const double d2 =
      std::sqrt(((f1 - f0).array() / scale.array()).square().mean()) / h0;
  const double dmax = std::max(d1n, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / dmax, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

Vector OdeSystem::evaluate(double t, const Vector& x) const {
  Vector dx(dimension());
  rhs(t, x, dx);
  return dx;
}

std::size_t grid_size(double t0, double tf, double dt) {
  if (!(tf > t0)) {
    throw ContractError("time grid needs tf > t0");
  }
  if (!(dt > 0.0)) {
    throw ContractError("time grid needs dt > 0");
  }
  const double intervals = std::floor((tf - t0) / dt + 1e-9);
  if (intervals + 1.0 > static_cast<double>(kMaxTrajectorySamples)) {
    throw ContractError("time grid exceeds the sample budget of " +
                        std::to_string(kMaxTrajectorySamples) + " points");
  }
  return static_cast<std::size_t>(intervals) + 1;
}

TimeSeries integrate_rk45(const OdeSystem& system, const Vector& x0, double t0,
                          double tf, double dt, double rel_tol,
                          double abs_tol) {
  if (x0.size() != system.dimension()) {
    throw ContractError("initial state has " + std::to_string(x0.size()) +
                        " entries for a " +
                        std::to_string(system.dimension()) + "-d system");
  }
  require_finite(x0, "initial state");
  const std::size_t n = grid_size(t0, tf, dt);
  const double t_end = t0 + static_cast<double>(n - 1) * dt;

  Matrix out(static_cast<Index>(n), system.dimension());
  out.row(0) = x0.transpose();
  std::size_t next = 1;

  double t = t0;
  Vector y = x0;
  Vector k1 = system.evaluate(t, y);
  double h = initial_step(system, t, y, k1, rel_tol, abs_tol, t_end - t0);
  bool rejected = false;
  constexpr std::size_t kMaxSteps = 50'000'000;

  for (std::size_t step = 0; next < n; ++step) {
    if (step >= kMaxSteps) {
      throw IntegrationError(
          "integration exceeded " + std::to_string(kMaxSteps) + " steps", t);
    }
    const double min_step =
        16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < min_step && t_end - t > min_step) {
      throw IntegrationError("step size underflow at t = " + std::to_string(t),
                             t);
    }
    if (t + 1.01 * h >= t_end) h = t_end - t;

    const Vector k2 = system.evaluate(t + c2 * h, y + h * a21 * k1);
    const Vector k3 =
        system.evaluate(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = system.evaluate(
        t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = system.evaluate(
        t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = system.evaluate(
        t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector y1 =
        y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vector k7 = system.evaluate(t + h, y1);

    const Vector err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, y1, rel_tol, abs_tol);
    if (!std::isfinite(en) || !y1.allFinite()) {
      h *= 0.1;
      rejected = true;
      continue;
    }

    if (en > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      rejected = true;
      continue;
    }

    // Accepted: emit every grid point inside (t, t + h].
    const double t_new = (t + h >= t_end) ? t_end : t + h;
    const Vector ydiff = y1 - y;
    const Vector bspl = h * k1 - ydiff;
    const Vector r4 = ydiff - h * k7 - bspl;
    const Vector r5 =
        h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    while (next < n) {
      const bool last = next + 1 == n;
      const double tg = last ? t_end : t0 + static_cast<double>(next) * dt;
      if (tg > t_new) break;
      if (last) {
        out.row(static_cast<Index>(next)) = y1.transpose();
      } else {
        const double theta = (tg - t) / h;
        const double theta1 = 1.0 - theta;
        const Vector yg =
            y + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
        out.row(static_cast<Index>(next)) = yg.transpose();
      }
      ++next;
    }

    t = t_new;
    y = y1;
    k1 = k7;
    const double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2),
                                  0.2, rejected ? 1.0 : 10.0);
    h *= fac;
    rejected = false;
  }

  return TimeSeries(t0, dt, std::move(out), system.variable_names);
}

Eigen::Vector3d lorenz_rhs(const Eigen::Vector3d& s, double sigma, double rho,
                           double beta) {
  return {sigma * (s.y() - s.x()), rho * s.x() - s.y() - s.x() * s.z(),
          s.x() * s.y() - beta * s.z()};
}

Eigen::Vector2d fitzhugh_nagumo_rhs(const Eigen::Vector2d& s,
                                    double cubic_sign) {
  const double x = s.x();
  return {0.1 + x + cubic_sign * x * x * x / 3.0 - s.y(), 0.1 * (x - s.y())};
}

double logistic_exact(double t, double r, double k, double x0) {
  if (!(k > 0.0) || !(x0 > 0.0)) {
    throw ContractError("logistic_exact needs K > 0 and x0 > 0");
  }
  // Divided through by e^{rt} so large t does not overflow.
  const double decay = std::exp(-r * t);
  return k * x0 / (k * decay + x0 * (1.0 - decay));
}

Eigen::Vector2d forced_vdp_rhs(double t, const Eigen::Vector2d& s, double mu,
                               double amplitude, double omega) {
  const double x = s.x();
  const double v = s.y();
  return {v, -mu * (1.0 - x * x) * v - x + amplitude * std::sin(omega * t)};
}

OdeSystem lorenz_system(double sigma, double rho, double beta) {
  OdeSystem sys;
  sys.name = "lorenz";
  sys.variable_names = {"x", "y", "z"};
  sys.parameters = {{"sigma", sigma}, {"rho", rho}, {"beta", beta}};
  sys.rhs = [sigma, rho, beta](double, const Vector& x, Vector& dx) {
    dx = lorenz_rhs(Eigen::Vector3d(x(0), x(1), x(2)), sigma, rho, beta);
  };
  return sys;
}

OdeSystem fitzhugh_nagumo_system(double cubic_sign) {
  OdeSystem sys;
  sys.name = "fhn";
  sys.variable_names = {"x", "y"};
  sys.parameters = {{"cubic_sign", cubic_sign}};
  sys.rhs = [cubic_sign](double, const Vector& x, Vector& dx) {
    dx = fitzhugh_nagumo_rhs(Eigen::Vector2d(x(0), x(1)), cubic_sign);
  };
  return sys;
}

OdeSystem logistic_system(double r, double k) {
  OdeSystem sys;
  sys.name = "logistic";
  sys.variable_names = {"x"};
  sys.parameters = {{"r", r}, {"K", k}};
  sys.rhs = [r, k](double, const Vector& x, Vector& dx) {
    dx(0) = r * x(0) * (1.0 - x(0) / k);
  };
  return sys;
}

OdeSystem forced_vdp_system(double omega, double mu, double amplitude,
                            double damping_sign) {
  OdeSystem sys;
  sys.name = "vdp";
  sys.variable_names = {"x", "v"};
  sys.parameters = {{"mu", mu},
                    {"A", amplitude},
                    {"omega", omega},
                    {"damping_sign", damping_sign}};
  sys.time_dependent = true;
  const double signed_mu = damping_sign * mu;
  sys.rhs = [signed_mu, amplitude, omega](double t, const Vector& x,
                                          Vector& dx) {
    dx = forced_vdp_rhs(t, Eigen::Vector2d(x(0), x(1)), signed_mu, amplitude,
                        omega);
  };
  return sys;
}

TimeSeries logistic_trajectory(double r, double k, double x0, double t0,
                               double tf, double dt) {
  const std::size_t n = grid_size(t0, tf, dt);
  Matrix states(static_cast<Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    states(static_cast<Index>(i), 0) = logistic_exact(t - t0, r, k, x0);
  }
  return TimeSeries(t0, dt, std::move(states), {"x"});
}

Matrix analytic_derivatives(const OdeSystem& system, const TimeSeries& x) {
  if (x.dimension() != system.dimension()) {
    throw ContractError("series dimension does not match the system");
  }
  Matrix dx(x.samples(), x.dimension());
  Vector state(x.dimension());
  Vector d(x.dimension());
  for (Index k = 0; k < x.samples(); ++k) {
    state = x.states().row(k).transpose();
    system.rhs(x.time(k), state, d);
    dx.row(k) = d.transpose();
  }
  return dx;
}

TrueModel lorenz_true_model(double sigma, double rho, double beta) {
  return {"lorenz",
          {{{"x", -sigma}, {"y", sigma}},
           {{"x", rho}, {"y", -1.0}, {"x*z", -1.0}},
           {{"x*y", 1.0}, {"z", -beta}}}};
}

TrueModel fitzhugh_nagumo_true_model(double cubic_sign) {
  return {"fhn",
          {{{"1", 0.1}, {"x", 1.0}, {"x^3", cubic_sign / 3.0}, {"y", -1.0}},
           {{"x", 0.1}, {"y", -0.1}}}};
}

TrueModel logistic_true_model(double r, double k) {
  return {"logistic", {{{"x", r}, {"x^2", -r / k}}}};
}

TrueModel forced_vdp_true_model(double omega, double alpha, double mu,
                                double amplitude, double damping_sign) {
  const double eps = omega - alpha;
  mu *= damping_sign;
  std::vector<ModelTerm> second = {
      {"x", -1.0},
      {"v", -mu},
      {"x^2*v", mu},
      {time_feature_name(alpha, TimeFamily::kSin), amplitude},
  };
  if (eps != 0.0) {
    second.emplace_back(time_feature_name(alpha, TimeFamily::kTCos),
                        amplitude * eps);
    second.emplace_back(time_feature_name(alpha, TimeFamily::kT2Sin),
                        -0.5 * amplitude * eps * eps);
  }
  return {"vdp", {{{"v", 1.0}}, std::move(second)}};
}

CoefficientMatrix ground_truth_coefficients(const TrueModel& model,
                                            const LibrarySpec& library) {
  CoefficientMatrix out;
  out.column_names = library_column_names(library);
  out.values = Matrix::Zero(static_cast<Index>(model.equations.size()),
                            static_cast<Index>(out.column_names.size()));
  for (std::size_t eq = 0; eq < model.equations.size(); ++eq) {
    for (const auto& [term, coef] : model.equations[eq]) {
      const auto it =
          std::find(out.column_names.begin(), out.column_names.end(), term);
      if (it == out.column_names.end()) {
        throw MissingTermError("term '" + term + "' of the " + model.system +
                               " model is not in the library");
      }
      out.values(static_cast<Index>(eq),
                 static_cast<Index>(it - out.column_names.begin())) += coef;
    }
  }
  return out;
}

}  // namespace sparseid
