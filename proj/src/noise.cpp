#include "salab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "salab/stats.hpp"

namespace salab {

std::string to_string(NoiseFamily family)
{
  switch (family) {
    case NoiseFamily::bounded_uniform: return "bounded-uniform";
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::laplace: return "laplace";
    case NoiseFamily::pareto: return "pareto";
  }
  return "unknown";
}

std::string to_string(TailClass tail)
{
  switch (tail) {
    case TailClass::bounded: return "bounded";
    case TailClass::sub_exponential: return "sub-exponential";
    case TailClass::heavy: return "heavy";
  }
  return "unknown";
}

std::string to_string(TailVerdict verdict)
{
  switch (verdict) {
    case TailVerdict::pass: return "pass";
    case TailVerdict::fail: return "fail";
    case TailVerdict::too_light: return "too-light";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(const std::string& name)
{
  if (name == "bounded-uniform") return NoiseFamily::bounded_uniform;
  if (name == "gaussian") return NoiseFamily::gaussian;
  if (name == "laplace") return NoiseFamily::laplace;
  if (name == "pareto") return NoiseFamily::pareto;
  throw NoiseError("unknown noise family '" + name + "'");
}

TailClass parse_tail_class(const std::string& name)
{
  if (name == "bounded") return TailClass::bounded;
  if (name == "sub-exponential") return TailClass::sub_exponential;
  if (name == "heavy") return TailClass::heavy;
  throw NoiseError("unknown tail class '" + name + "'");
}

TailClass NoiseModel::tail_class() const
{
  switch (family) {
    case NoiseFamily::bounded_uniform: return TailClass::bounded;
    case NoiseFamily::gaussian:
    case NoiseFamily::laplace: return TailClass::sub_exponential;
    case NoiseFamily::pareto: return TailClass::heavy;
  }
  return TailClass::heavy;
}

void NoiseModel::validate(std::optional<TailClass> declared) const
{
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw NoiseError("noise scale must be finite and >= 0");
  if (family == NoiseFamily::pareto && !(pareto_shape > 2.0))
    throw NoiseError("pareto shape must exceed 2 for finite variance");
  if (!declared) return;
  const TailClass actual = tail_class();
  const bool heavy_declared = *declared == TailClass::heavy;
  const bool heavy_actual = actual == TailClass::heavy;
  if (heavy_declared != heavy_actual || (*declared == TailClass::bounded && actual != TailClass::bounded))
    throw NoiseError("declared tail class '" + to_string(*declared) + "' is inconsistent with family '" +
                     to_string(family) + "'");
}

std::string NoiseModel::describe() const
{
  std::ostringstream out;
  out << to_string(family) << "(scale=" << scale << ", coupling=" << (state_coupling ? "on" : "off");
  if (family == NoiseFamily::pareto) out << ", shape=" << pareto_shape;
  out << ")";
  return out.str();
}

void sample_into(const NoiseModel& model, const State& x, Rng& rng, State& out)
{
  const Eigen::Index d = x.size();
  out.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double xi = 0.0;
    switch (model.family) {
      case NoiseFamily::bounded_uniform: xi = 2.0 * rng.uniform() - 1.0; break;
      case NoiseFamily::gaussian: xi = rng.normal(); break;
      case NoiseFamily::laplace: xi = rng.sign() * -std::log(rng.uniform_open_zero()); break;
      case NoiseFamily::pareto:
        xi = rng.sign() * std::pow(rng.uniform_open_zero(), -1.0 / model.pareto_shape);
        break;
    }
    out[i] = xi;
  }
  double factor = model.scale;
  if (model.state_coupling) factor *= 1.0 + x.norm();
  out *= factor;
}

State sample(const NoiseModel& model, const State& x, Rng& rng)
{
  State m;
  sample_into(model, x, rng, m);
  return m;
}

TailFit verify_tail(const NoiseModel& model, const std::vector<State>& x_probe,
                    const std::vector<double>& v_grid, std::int64_t samples_per_point,
                    std::uint64_t rng_seed)
{
  if (x_probe.empty()) throw NoiseError("verify_tail needs at least one probe");
  if (v_grid.empty() || !std::is_sorted(v_grid.begin(), v_grid.end()) ||
      std::adjacent_find(v_grid.begin(), v_grid.end()) != v_grid.end())
    throw NoiseError("v_grid must be strictly increasing");
  if (samples_per_point < 10000) throw NoiseError("verify_tail needs >= 1e4 samples per probe");

  TailFit fit;
  fit.v_grid = v_grid;
  fit.exceedance_counts.assign(v_grid.size(), 0);

  Rng rng(rng_seed);
  State m;
  for (const auto& x : x_probe) {
    const double scaling = 1.0 + x.norm();
    for (std::int64_t k = 0; k < samples_per_point; ++k) {
      sample_into(model, x, rng, m);
      const double r = m.norm() / scaling;
      // v_grid is sorted: count every threshold below r.
      const auto above = std::lower_bound(v_grid.begin(), v_grid.end(), r) - v_grid.begin();
      for (std::ptrdiff_t j = 0; j < above; ++j) ++fit.exceedance_counts[j];
    }
  }
  const double total = static_cast<double>(samples_per_point) * static_cast<double>(x_probe.size());
  for (auto c : fit.exceedance_counts) fit.exceedance_probs.push_back(static_cast<double>(c) / total);

  std::vector<double> vs, logp;
  for (std::size_t j = 0; j < v_grid.size(); ++j)
    if (fit.exceedance_counts[j] >= kMinTailExceedances) {
      vs.push_back(v_grid[j]);
      logp.push_back(std::log(fit.exceedance_probs[j]));
    }
  fit.points_used = static_cast<int>(vs.size());

  if (vs.size() < 3) {
    fit.C2_hat = std::numeric_limits<double>::infinity();
    fit.C1_hat = vs.empty() ? 0.0 : 1.0;
    fit.r_squared = 1.0;
    fit.verdict = TailVerdict::too_light;
    return fit;
  }

  const LineFit line = least_squares_line(vs, logp);
  fit.C1_hat = std::exp(line.intercept);
  fit.C2_hat = -line.slope;
  fit.r_squared = line.r_squared;

  if (vs.size() >= 4) {
    const std::size_t half = (vs.size() + 1) / 2;
    const std::vector<double> v_lo(vs.begin(), vs.begin() + half), p_lo(logp.begin(), logp.begin() + half);
    const std::vector<double> v_hi(vs.end() - half, vs.end()), p_hi(logp.end() - half, logp.end());
    const double s_lo = least_squares_line(v_lo, p_lo).slope;
    const double s_hi = least_squares_line(v_hi, p_hi).slope;
    fit.slope_ratio = s_lo < 0.0 ? s_hi / s_lo : 0.0;
  }

  const bool exponential_shape = fit.r_squared >= 0.9 && fit.slope_ratio >= kTailConvexityFloor;
  fit.verdict = (fit.C2_hat > 0.0 && exponential_shape) ? TailVerdict::pass : TailVerdict::fail;
  return fit;
}

double verify_second_moment(const NoiseModel& model, const std::vector<State>& x_probe,
                            std::int64_t samples_per_point, std::uint64_t rng_seed)
{
  if (x_probe.empty()) throw NoiseError("verify_second_moment needs at least one probe");
  if (samples_per_point < 10000) throw NoiseError("verify_second_moment needs >= 1e4 samples per probe");
  Rng rng(rng_seed);
  State m;
  double worst = 0.0;
  for (const auto& x : x_probe) {
    double acc = 0.0;
    for (std::int64_t k = 0; k < samples_per_point; ++k) {
      sample_into(model, x, rng, m);
      acc += m.squaredNorm();
    }
    const double mean = acc / static_cast<double>(samples_per_point);
    worst = std::max(worst, mean / (1.0 + x.squaredNorm()));
  }
  return worst;
}

}  // namespace salab
