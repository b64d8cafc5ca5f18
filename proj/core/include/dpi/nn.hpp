#pragma once

#include <span>
#include <string>

#include "dpi/params.hpp"
#include "dpi/tape.hpp"

namespace dpi {

/// Linear layer y = x W + b, weights registered under `prefix` in the set.
class Dense {
 public:
  Dense() = default;
  Dense(ParamSet& ps, const std::string& prefix, int in, int out, Rng& rng)
      : w_(&ps.add(prefix + ".w", glorot_uniform({in, out}, in, out, rng))),
        b_(&ps.add(prefix + ".b", Tensor::zeros({1, out}))) {}

  Tape::Id forward(Tape& t, Tape::Id x) const {
    return t.add_row(t.matmul(x, t.param(*w_)), t.param(*b_));
  }
  int in_dim() const { return w_->value.rows(); }
  int out_dim() const { return w_->value.cols(); }

 private:
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
};

/// Standard GRU cell (update/reset gates, tanh candidate).
class GruCell {
 public:
  GruCell() = default;
  GruCell(ParamSet& ps, const std::string& prefix, int in, int hidden, Rng& rng);

  /// x [B,in], h [B,hidden] -> next hidden [B,hidden].
  Tape::Id forward(Tape& t, Tape::Id x, Tape::Id h) const;
  int hidden_dim() const { return hidden_; }

 private:
  Parameter *wz_ = nullptr, *uz_ = nullptr, *bz_ = nullptr;
  Parameter *wr_ = nullptr, *ur_ = nullptr, *br_ = nullptr;
  Parameter *wn_ = nullptr, *un_ = nullptr, *bn_ = nullptr;
  int hidden_ = 0;
};

/// Observation geometry as reported by an environment.
struct ObsGeometry {
  int flat_dim = 0;
  bool image = false;
  int channels = 0, height = 0, width = 0;
};

struct EncoderSpec {
  ObsGeometry obs;
  int hidden = 32;   // encoder output width
  int conv1 = 8;     // image path only
  int conv2 = 8;
  int ksize = 3;
  double leaky_slope = 0.01;
};

/// Per-frame observation encoder. Feature vectors go through two dense
/// layers (leaky ReLU); images through two ReLU convolutions and a dense
/// layer. Input rows are flattened observations (images in CHW order).
class StateEncoder {
 public:
  StateEncoder() = default;
  StateEncoder(ParamSet& ps, const std::string& prefix, const EncoderSpec& spec, Rng& rng);

  Tape::Id forward(Tape& t, Tape::Id x) const;
  int out_dim() const { return spec_.hidden; }
  const EncoderSpec& spec() const { return spec_; }

 private:
  EncoderSpec spec_;
  Dense d1_, d2_;                       // feature path
  Parameter *cw1_ = nullptr, *cb1_ = nullptr;  // image path
  Parameter *cw2_ = nullptr, *cb2_ = nullptr;
  Dense cd_;
};

inline Tape::Id leaky(Tape& t, Tape::Id x, double slope) { return t.leaky_relu(x, slope); }

}  // namespace dpi
