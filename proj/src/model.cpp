#include "nfield/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nfield/errors.hpp"

namespace nfield {

void ModelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid model parameters: ") + what);
  };
  require(alpha > 0.0, "alpha must be positive");
  require(tau0 > 0.0, "tau0 must be positive");
  require(gamma > 0.0, "gamma must be positive");
  require(a > 0.0 && b > 0.0, "rectangle half-widths must be positive");
  require(!terms.empty(), "at least one connectivity term is required");

  // J must be real on the rectangle; checked on a 9x9 sample grid.
  constexpr int kSamples = 9;
  std::vector<Point2> pts;
  for (int i = 0; i < kSamples; ++i)
    for (int j = 0; j < kSamples; ++j)
      pts.push_back({-a + 2.0 * a * i / (kSamples - 1), -b + 2.0 * b * j / (kSamples - 1)});
  double max_abs = 0.0;
  double max_imag = 0.0;
  for (const auto& r : pts) {
    for (const auto& rp : pts) {
      const cplx J = kernel_eval(r, rp, *this);
      max_abs = std::max(max_abs, std::abs(J));
      max_imag = std::max(max_imag, std::abs(J.imag()));
    }
  }
  if (max_imag > 1e-12 * max_abs) {
    std::ostringstream os;
    os << "invalid model parameters: connectivity kernel is not real-valued (max |Im J| = "
       << max_imag << ", max |J| = " << max_abs << ")";
    throw ConfigError(os.str());
  }
}

ModelParams reference_params(double c_hat) {
  ModelParams p;
  p.alpha = 1.0;
  p.tau0 = 1.0;
  p.gamma = 4.0;
  p.a = 1.0;
  p.b = 1.0;
  p.terms = {{cplx(c_hat, 0.0), cplx(2.0, 0.0)}};
  return p;
}

ModelParams with_c_hat(ModelParams params, cplx c_hat, std::size_t index) {
  if (index >= params.terms.size()) throw InvalidArgument("with_c_hat: term index out of range");
  params.terms[index].c_hat = c_hat;
  return params;
}

double firing_rate(double u, double gamma) {
  // 1/(1+e^{-x}) - 1/2 == tanh(x/2)/2, which keeps precision near zero.
  return 0.5 * std::tanh(0.5 * gamma * u);
}

cplx kernel_eval(Point2 r, Point2 rp, const ModelParams& params) {
  const double d = l1_distance(r, rp);
  cplx sum = 0.0;
  for (const auto& t : params.terms) sum += t.c_hat * std::exp(-t.xi * d);
  return sum;
}

double delay_eval(Point2 r, Point2 rp, const ModelParams& params) {
  return params.tau0 + l1_distance(r, rp);
}

namespace {

nlohmann::json complex_to_json(cplx v) { return nlohmann::json::array({v.real(), v.imag()}); }

cplx complex_from_json(const nlohmann::json& j, const char* key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(std::string("expected a number or [re, im] pair for '") + key + "'");
}

double number_at(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing model key '") + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(std::string("model key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const ModelParams& params) {
  j = nlohmann::json::object();
  j["alpha"] = params.alpha;
  j["tau0"] = params.tau0;
  j["gamma"] = params.gamma;
  j["a"] = params.a;
  j["b"] = params.b;
  auto terms = nlohmann::json::array();
  for (const auto& t : params.terms)
    terms.push_back({{"c_hat", complex_to_json(t.c_hat)}, {"xi", complex_to_json(t.xi)}});
  j["terms"] = std::move(terms);
}

void from_json(const nlohmann::json& j, ModelParams& params) {
  if (!j.is_object()) throw ConfigError("model section must be a JSON object");
  params.alpha = number_at(j, "alpha");
  params.tau0 = number_at(j, "tau0");
  params.gamma = number_at(j, "gamma");
  params.a = number_at(j, "a");
  params.b = number_at(j, "b");
  if (!j.contains("terms") || !j.at("terms").is_array())
    throw ConfigError("model key 'terms' must be an array");
  params.terms.clear();
  for (const auto& t : j.at("terms")) {
    if (!t.contains("c_hat") || !t.contains("xi"))
      throw ConfigError("each term needs 'c_hat' and 'xi'");
    params.terms.push_back({complex_from_json(t.at("c_hat"), "c_hat"), complex_from_json(t.at("xi"), "xi")});
  }
  params.validate();
}

}  // namespace nfield
