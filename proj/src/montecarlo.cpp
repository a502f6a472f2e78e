#include "salab/montecarlo.hpp"

namespace salab {

State InitLaw::sample(Rng& rng) const
{
  if (const auto* point = std::get_if<State>(&law)) return *point;
  return std::get<Box>(law).sample(rng);
}

int InitLaw::dim() const
{
  if (const auto* point = std::get_if<State>(&law)) return static_cast<int>(point->size());
  return std::get<Box>(law).dim();
}

namespace {

void subsample(std::vector<Index>& out, Index from, Index to, int per_block)
{
  const Index len = to - from;
  for (int k = 1; k < per_block; ++k) out.push_back(from + (len * k) / per_block);
}

}  // namespace

std::vector<Index> checkpoint_indices(const StepSchedule& schedule, Index n0, double T, Index horizon,
                                      int per_block)
{
  if (horizon < n0) throw std::invalid_argument("checkpoint horizon precedes n0");
  if (!(T > 0.0) || per_block < 1) throw std::invalid_argument("checkpoints need T > 0 and per_block >= 1");

  std::vector<Index> out{n0};
  double t = schedule.elapsed_time(n0);
  double block_start = t;
  Index last_boundary = n0;
  for (Index n = n0; n < horizon; ++n) {
    t += schedule.step(n);
    if (t >= block_start + T) {
      subsample(out, last_boundary, n + 1, per_block);
      out.push_back(n + 1);
      last_boundary = n + 1;
      block_start = t;
    }
  }
  if (last_boundary < horizon) {
    subsample(out, last_boundary, horizon, per_block);
    out.push_back(horizon);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Index index_after_time(const StepSchedule& schedule, Index n0, double duration)
{
  const double t0 = schedule.elapsed_time(n0);
  double t = t0;
  Index n = n0;
  while (t - t0 < duration) {
    t += schedule.step(n);
    ++n;
  }
  return n;
}

}  // namespace salab
