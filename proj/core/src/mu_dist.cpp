#include "coalsim/mu_dist.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "coalsim/numeric.hpp"
#include "json.hpp"

namespace coalsim {

double laplace_mu(double alpha, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("laplace_mu requires lambda >= 0");
  if (lambda == 0.0) return 1.0;
  return -std::expm1(-std::log1p(std::pow(lambda, 1.0 - alpha)) / (alpha - 1.0));
}

double laplace_size_biased(double alpha, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("laplace_size_biased requires lambda >= 0");
  if (lambda == 0.0) return 1.0;
  return std::exp(-alpha / (alpha - 1.0) * std::log1p(std::pow(lambda, alpha - 1.0)));
}

double mu_tail(double alpha, double x) {
  return std::pow(x, -alpha) / std::tgamma(2.0 - alpha);
}

namespace {

// Euler-accelerated Bromwich inversion (Abate-Whitt). Inverts
// s -> laplace_mu(alpha,s)/s, whose original function is the CDF F.
class EulerInverter {
 public:
  EulerInverter(double alpha, int m) : alpha_(alpha), m_(m), xi_(2 * m + 1, 0.0) {
    xi_[0] = 0.5;
    for (int k = 1; k <= m_; ++k) xi_[k] = 1.0;
    xi_[2 * m_] = std::pow(2.0, -m_);
    for (int k = 1; k < m_; ++k) {
      xi_[2 * m_ - k] = xi_[2 * m_ - k + 1] + std::exp(log_choose(m_, k) - m_ * std::numbers::ln2);
    }
    scale_ = std::exp(m_ * std::numbers::ln10 / 3.0);
  }

  double cdf(double t) const {
    const double re = m_ * std::numbers::ln10 / 3.0;
    double sum = 0.0;
    for (int k = 0; k <= 2 * m_; ++k) {
      const std::complex<double> s(re / t, std::numbers::pi * k / t);
      const double term = xi_[k] * std::real(transform(s));
      sum += (k % 2 == 0) ? term : -term;
    }
    return scale_ * sum / t;
  }

 private:
  std::complex<double> transform(std::complex<double> s) const {
    const std::complex<double> w = std::pow(s, 1.0 - alpha_);
    const std::complex<double> phi =
        1.0 - std::exp(-std::log(1.0 + w) / (alpha_ - 1.0));
    return phi / s;
  }

  double alpha_;
  int m_;
  std::vector<double> xi_;
  double scale_;
};

}  // namespace

MuTable build_mu_table(double alpha, const MuTableConfig& config) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw std::invalid_argument("build_mu_table requires alpha in (1,2)");
  }
  const EulerInverter inverter(alpha, config.euler_terms);
  const double growth = std::pow(10.0, 1.0 / config.points_per_decade);
  const double tail_coeff = 1.0 / std::tgamma(2.0 - alpha);

  // F(x) ~ x^{alpha-1} / ((alpha-1) Gamma(alpha)) as x -> 0, so pick the first
  // abscissa where F is about 0.005 (and never above the 1e-4 contract)
  const double x_start = std::min(
      config.x_min,
      std::pow(0.005 * (alpha - 1.0) * std::tgamma(alpha), 1.0 / (alpha - 1.0)));

  // generous upper bound: where the analytic tail predicts survival 1e-5
  const double x_stop = std::pow(tail_coeff / 1e-5, 1.0 / alpha) * 4.0;

  std::vector<double> xs, cdf;
  double x = x_start;
  int switch_index = -1;
  while (x <= x_stop) {
    double f = inverter.cdf(x);
    if (!cdf.empty()) {
      if (f < cdf.back() - 1e-9) {
        throw numerical_error("mu inversion non-monotone at x=" + std::to_string(x) +
                              ": F=" + std::to_string(f) + " after " +
                              std::to_string(cdf.back()));
      }
      if (f <= cdf.back()) f = cdf.back() + 1e-15;  // absorb inversion noise
    }
    xs.push_back(x);
    cdf.push_back(f);
    const double survival = 1.0 - f;
    const double tail = mu_tail(alpha, x);
    if (static_cast<int>(xs.size()) >= config.min_points &&
        survival <= config.tail_survival_max &&
        std::fabs(survival - tail) <= config.tail_rtol * tail) {
      switch_index = static_cast<int>(xs.size()) - 1;
      break;
    }
    x *= growth;
  }
  if (switch_index < 0) {
    throw numerical_error("mu table: no switch point where table and analytic tail agree "
                          "within tolerance (alpha=" + std::to_string(alpha) + ")");
  }

  MuTable table;
  table.alpha = alpha;
  table.x = std::move(xs);
  table.cdf = std::move(cdf);
  table.tail_coeff = tail_coeff;
  table.tail_exponent = alpha;
  table.switch_point = table.x.back();

  if (!(table.cdf.front() < 0.01)) {
    throw numerical_error("mu table: F(x_min) = " + std::to_string(table.cdf.front()) +
                          " not < 0.01");
  }
  const double mean = table.mean_estimate();
  if (std::fabs(mean - 1.0) > 5e-3) {
    throw numerical_error("mu table: mean estimate " + std::to_string(mean) +
                          " deviates from 1 beyond 5e-3");
  }
  return table;
}

double MuTable::cdf_at(double value) const {
  if (value <= 0.0) return 0.0;
  if (value >= switch_point) return 1.0 - tail_coeff * std::pow(value, -tail_exponent);
  if (value <= x.front()) return cdf.front() * value / x.front();
  const auto it = std::upper_bound(x.begin(), x.end(), value);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double w = (value - x[i - 1]) / (x[i] - x[i - 1]);
  return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
}

double MuTable::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile requires p in (0,1)");
  }
  if (p >= cdf.back()) {
    // invert the analytic tail: 1 - p = tail_coeff x^{-alpha}
    const double xt = std::pow((1.0 - p) / tail_coeff, -1.0 / tail_exponent);
    return std::max(xt, switch_point);
  }
  if (p <= cdf.front()) return x.front() * p / cdf.front();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
  const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  const double w = (p - cdf[i - 1]) / (cdf[i] - cdf[i - 1]);
  return x[i - 1] + w * (x[i] - x[i - 1]);
}

double MuTable::mean_estimate() const {
  KahanSum sum;
  sum.add(0.5 * x.front() * (1.0 + (1.0 - cdf.front())));  // [0, x_1], F(0)=0
  for (std::size_t i = 1; i < x.size(); ++i) {
    sum.add(0.5 * (x[i] - x[i - 1]) * ((1.0 - cdf[i - 1]) + (1.0 - cdf[i])));
  }
  // analytic tail beyond the switch point
  sum.add(tail_coeff * std::pow(switch_point, 1.0 - tail_exponent) / (tail_exponent - 1.0));
  return sum.value();
}

double quantile_mu(const MuTable& table, double p) { return table.quantile(p); }

double sample_mu(const MuTable& table, RngStream& rng) { return table.sample(rng); }

void save_mu_table(const MuTable& table, const std::string& csv_path,
                   const std::string& json_path) {
  {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    csv << "x,F\n";
    csv.precision(17);
    for (std::size_t i = 0; i < table.x.size(); ++i) {
      csv << table.x[i] << ',' << table.cdf[i] << '\n';
    }
  }
  nlohmann::json header{{"version", 1},
                        {"alpha", table.alpha},
                        {"tail_coeff", table.tail_coeff},
                        {"tail_exponent", table.tail_exponent},
                        {"switch_point", table.switch_point},
                        {"points", table.x.size()}};
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot open " + json_path);
  js << header.dump(2) << '\n';
}

MuTable load_mu_table(const std::string& csv_path, const std::string& json_path) {
  nlohmann::json header;
  {
    std::ifstream js(json_path);
    if (!js) throw std::runtime_error("cannot open " + json_path);
    js >> header;
  }
  if (header.at("version").get<int>() != 1) {
    throw std::runtime_error("unsupported mu table version");
  }
  MuTable table;
  table.alpha = header.at("alpha").get<double>();
  table.tail_coeff = header.at("tail_coeff").get<double>();
  table.tail_exponent = header.at("tail_exponent").get<double>();
  table.switch_point = header.at("switch_point").get<double>();
  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  std::getline(csv, line);  // column header
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    table.x.push_back(std::stod(line.substr(0, comma)));
    table.cdf.push_back(std::stod(line.substr(comma + 1)));
  }
  if (table.x.size() != header.at("points").get<std::size_t>() || table.x.empty()) {
    throw std::runtime_error("mu table CSV does not match header");
  }
  return table;
}

}  // namespace coalsim
