#pragma once

#include <cstdint>
#include <vector>

#include "congeo/infonce.hpp"
#include "congeo/matrices.hpp"

namespace congeo {

enum class Constraint { free, unit_sphere };

struct DescentConfig {
  int steps = 20000;
  double step_size = 1.0;
  double decay = 0.5;  // step_size multiplier on plateau
  int restarts = 4;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  Constraint constraint = Constraint::free;
  double stop_grad_norm = 1e-7;
};

struct TracePoint {
  int step = 0;
  double loss = 0.0;
  double gap = 0.0;
  double grad_norm = 0.0;
};

struct DescentTrace {
  std::vector<TracePoint> checkpoints;
  Embedding final_embedding;
  bool converged = false;
  double loss = 0.0;
  double gap = 0.0;
  double grad_norm = 0.0;
  bool ratio_undefined = false;
  int restart = 0;
  int accepted_steps = 0;
};

// best restart by final loss (ties to the lower restart index); restart r
// draws from seed + r, so multi-threaded runs are bit-identical to serial
DescentTrace minimize(const WeightMatrix& W, const SimilaritySpec& spec, int q,
                      const DescentConfig& cfg, int threads = 1);

}  // namespace congeo
