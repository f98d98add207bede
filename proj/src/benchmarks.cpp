#include "gasfc/benchmarks.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "gasfc/error.hpp"

namespace gasfc {
namespace {

Eigen::VectorXd differences(const VectorCRef& y) {
  const Eigen::Index n = y.size();
  return y.tail(n - 1) - y.head(n - 1);
}

// Residual recursion on the differences x; errors before index 2 are zero.
// Returns the residuals e_2 .. e_{m-1} and, through `next`, the prediction of
// x_m from the full history.
Eigen::VectorXd css_errors(const ArimaParams& p, const Eigen::VectorXd& x, double* next = nullptr) {
  const Eigen::Index m = x.size();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  auto predict = [&](Eigen::Index t) {
    return p.intercept + p.ar[0] * x[t - 1] + p.ar[1] * x[t - 2] + p.ma[0] * e[t - 1] + p.ma[1] * e[t - 2];
  };
  for (Eigen::Index t = 2; t < m; ++t) {
    e[t] = x[t] - predict(t);
  }
  if (next) {
    *next = m >= 2 ? predict(m) : p.intercept;
  }
  return m > 2 ? Eigen::VectorXd(e.tail(m - 2)) : Eigen::VectorXd();
}

ArimaParams arima_from(const Eigen::VectorXd& v) {
  ArimaParams p;
  p.intercept = v[0];
  p.ar = {v[1], v[2]};
  p.ma = {v[3], v[4]};
  return p;
}

ForecastDistribution around(double point, const VectorCRef& residuals, Family family) {
  if (family == Family::sst) {
    throw DomainError("benchmark residual family must be normal or student_t");
  }
  if (!std::isfinite(point)) {
    throw NumericalError("benchmark point forecast is not finite");
  }
  return relocated(fit_residual_distribution(residuals, family), point);
}

struct OlsFit {
  Eigen::MatrixXd coef;  // (1 + 2p) x 2
  Eigen::MatrixXd resid;  // rows x 2
};

// Regress z_t on [1, z_{t-1}, ..., z_{t-p}] for t in [first, z.rows()).
OlsFit var_ols(const Eigen::MatrixXd& z, int p, Eigen::Index first) {
  const Eigen::Index rows = z.rows() - first;
  const Eigen::Index k = 1 + 2 * p;
  Eigen::MatrixXd x(rows, k);
  Eigen::MatrixXd y(rows, 2);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index t = first + r;
    x(r, 0) = 1.0;
    for (int lag = 1; lag <= p; ++lag) {
      x(r, 1 + 2 * (lag - 1)) = z(t - lag, 0);
      x(r, 2 + 2 * (lag - 1)) = z(t - lag, 1);
    }
    y.row(r) = z.row(t);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < k) {
    throw NumericalError("var_fit: regressor matrix is rank deficient at order " + std::to_string(p));
  }
  OlsFit f;
  f.coef = qr.solve(y);
  f.resid = y - x * f.coef;
  return f;
}

}  // namespace

Eigen::VectorXd arima_residuals(const ArimaParams& p, const VectorCRef& prices) {
  if (prices.size() < 4) {
    throw DataError("arima: at least 4 prices are required");
  }
  return css_errors(p, differences(prices));
}

ArimaFit arima_fit(const VectorCRef& prices, const OptimizerConfig& config, const ArimaParams* start) {
  if (prices.size() < 50) {
    throw DataError("arima_fit: at least 50 observations are required");
  }
  if (!prices.allFinite()) {
    throw DataError("arima_fit: prices must be finite");
  }
  const Eigen::VectorXd x = differences(prices);
  const double sd = std::sqrt((x.array() - x.mean()).square().mean());
  const double unit = sd > 0 ? sd : 1.0;
  ArimaFit fit;
  fit.info = {{"intercept", Domain::real(), 0.0, Alternative::two_sided, 0.1 * unit},
              {"ar1", Domain::real(), 0.0, Alternative::two_sided, 0.1},
              {"ar2", Domain::real(), 0.0, Alternative::two_sided, 0.1},
              {"ma1", Domain::real(), 0.0, Alternative::two_sided, 0.1},
              {"ma2", Domain::real(), 0.0, Alternative::two_sided, 0.1}};
  const Objective nll = [&x](const Eigen::VectorXd& v) {
    const Eigen::VectorXd e = css_errors(arima_from(v), x);
    const double n = static_cast<double>(e.size());
    const double sse = e.squaredNorm();
    if (!std::isfinite(sse)) return std::numeric_limits<double>::infinity();
    const double var = std::max(sse / n, 1e-300);
    return 0.5 * n * (std::log(2.0 * std::numbers::pi * var) + 1.0);
  };
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(5);
  if (start) {
    v0 << start->intercept, start->ar[0], start->ar[1], start->ma[0], start->ma[1];
  } else {
    v0[0] = x.mean();
  }
  fit.result = fit_mle(nll, v0, fit.info, config);
  fit.params = arima_from(fit.result.params);
  fit.residuals = css_errors(fit.params, x);
  fit.params.residual_scale = std::max(std::sqrt(fit.residuals.squaredNorm() / static_cast<double>(fit.residuals.size())),
                                       std::numeric_limits<double>::min());
  return fit;
}

double arima_point_forecast(const ArimaParams& p, const VectorCRef& history) {
  if (history.size() < 3) {
    throw DataError("arima forecast: at least 3 prices of history are required");
  }
  double next = 0.0;
  css_errors(p, differences(history), &next);
  return history[history.size() - 1] + next;
}

ForecastDistribution arima_forecast_one(const ArimaParams& p, const VectorCRef& history, const VectorCRef& residuals,
                                        Family residual_family) {
  return around(arima_point_forecast(p, history), residuals, residual_family);
}

VarModel var_fit(const VectorCRef& gas, const VectorCRef& oil, int max_order) {
  if (gas.size() != oil.size()) {
    throw DataError("var_fit: gas and oil series differ in length");
  }
  if (max_order < 1) {
    throw DomainError("var_fit: max_order must be at least 1");
  }
  if (gas.size() < 10 * max_order || gas.size() < 20) {
    throw DataError("var_fit: series too short for the requested maximum order");
  }
  if (!gas.allFinite() || !oil.allFinite()) {
    throw DataError("var_fit: series must be finite");
  }
  Eigen::MatrixXd z(gas.size() - 1, 2);
  z.col(0) = differences(gas);
  z.col(1) = differences(oil);

  VarModel m;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= max_order; ++p) {
    const OlsFit f = var_ols(z, p, max_order);
    const double n = static_cast<double>(f.resid.rows());
    const Eigen::Matrix2d cov = f.resid.transpose() * f.resid / n;
    const double det = cov.determinant();
    if (!(det > 0)) {
      throw NumericalError("var_fit: singular residual covariance at order " + std::to_string(p));
    }
    const double loglik = -0.5 * n * (2.0 * std::log(2.0 * std::numbers::pi) + std::log(det) + 2.0);
    const double k = 2.0 * (1.0 + 2.0 * p);
    const double aic = 2.0 * k - 2.0 * loglik;
    m.aic.push_back(aic);
    if (aic < best) {
      best = aic;
      m.order = p;
    }
  }
  const OlsFit f = var_ols(z, m.order, m.order);
  m.intercept = f.coef.row(0).transpose();
  m.coefficients.clear();
  for (int lag = 1; lag <= m.order; ++lag) {
    Eigen::Matrix2d a;
    a.col(0) = f.coef.row(1 + 2 * (lag - 1)).transpose();
    a.col(1) = f.coef.row(2 + 2 * (lag - 1)).transpose();
    m.coefficients.push_back(a);
  }
  m.residual_cov = f.resid.transpose() * f.resid / static_cast<double>(f.resid.rows());
  m.gas_residuals = f.resid.col(0);
  return m;
}

double var_point_forecast(const VarModel& m, const VectorCRef& gas, const VectorCRef& oil) {
  if (gas.size() != oil.size()) {
    throw DataError("var forecast: gas and oil histories differ in length");
  }
  if (gas.size() < m.order + 1) {
    throw DataError("var forecast: history shorter than the model order");
  }
  const Eigen::Index n = gas.size();
  double dgas = m.intercept[0];
  for (int lag = 1; lag <= m.order; ++lag) {
    const Eigen::Index t = n - lag;
    const Eigen::Vector2d z(gas[t] - gas[t - 1], oil[t] - oil[t - 1]);
    dgas += m.coefficients[static_cast<std::size_t>(lag - 1)].row(0).dot(z);
  }
  return gas[n - 1] + dgas;
}

ForecastDistribution var_forecast_one(const VarModel& m, const VectorCRef& gas, const VectorCRef& oil,
                                      Family residual_family) {
  return around(var_point_forecast(m, gas, oil), m.gas_residuals, residual_family);
}

}  // namespace gasfc
