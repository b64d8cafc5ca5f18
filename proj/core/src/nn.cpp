#include "dpi/nn.hpp"

namespace dpi {

GruCell::GruCell(ParamSet& ps, const std::string& prefix, int in, int hidden, Rng& rng)
    : hidden_(hidden) {
  auto gate = [&](const std::string& g, Parameter*& w, Parameter*& u, Parameter*& b) {
    w = &ps.add(prefix + ".w" + g, glorot_uniform({in, hidden}, in, hidden, rng));
    u = &ps.add(prefix + ".u" + g, glorot_uniform({hidden, hidden}, hidden, hidden, rng));
    b = &ps.add(prefix + ".b" + g, Tensor::zeros({1, hidden}));
  };
  gate("z", wz_, uz_, bz_);
  gate("r", wr_, ur_, br_);
  gate("n", wn_, un_, bn_);
}

Tape::Id GruCell::forward(Tape& t, Tape::Id x, Tape::Id h) const {
  auto z = t.sigmoid(t.add_row(t.add(t.matmul(x, t.param(*wz_)), t.matmul(h, t.param(*uz_))), t.param(*bz_)));
  auto r = t.sigmoid(t.add_row(t.add(t.matmul(x, t.param(*wr_)), t.matmul(h, t.param(*ur_))), t.param(*br_)));
  auto n = t.tanh_(t.add_row(t.add(t.matmul(x, t.param(*wn_)), t.mul(r, t.matmul(h, t.param(*un_)))), t.param(*bn_)));
  // h' = n + z * (h - n)
  return t.add(n, t.mul(z, t.sub(h, n)));
}

StateEncoder::StateEncoder(ParamSet& ps, const std::string& prefix, const EncoderSpec& spec, Rng& rng)
    : spec_(spec) {
  if (!spec.obs.image) {
    d1_ = Dense(ps, prefix + ".fc1", spec.obs.flat_dim, spec.hidden, rng);
    d2_ = Dense(ps, prefix + ".fc2", spec.hidden, spec.hidden, rng);
    return;
  }
  const int k = spec.ksize;
  const int c0 = spec.obs.channels;
  const int fan_area = k * k;
  cw1_ = &ps.add(prefix + ".conv1.w",
                 glorot_uniform({spec.conv1, c0 * k * k}, c0 * fan_area, spec.conv1 * fan_area, rng));
  cb1_ = &ps.add(prefix + ".conv1.b", Tensor::zeros({1, spec.conv1}));
  cw2_ = &ps.add(prefix + ".conv2.w",
                 glorot_uniform({spec.conv2, spec.conv1 * k * k}, spec.conv1 * fan_area,
                                spec.conv2 * fan_area, rng));
  cb2_ = &ps.add(prefix + ".conv2.b", Tensor::zeros({1, spec.conv2}));
  cd_ = Dense(ps, prefix + ".fc",
              spec.conv2 * spec.obs.height * spec.obs.width, spec.hidden, rng);
}

Tape::Id StateEncoder::forward(Tape& t, Tape::Id x) const {
  if (!spec_.obs.image) {
    auto h1 = leaky(t, d1_.forward(t, x), spec_.leaky_slope);
    auto h2 = leaky(t, d2_.forward(t, h1), spec_.leaky_slope);
    t.check_finite(h2, "StateEncoder.fc");
    return h2;
  }
  Tape::ConvMeta m1{spec_.obs.channels, spec_.obs.height, spec_.obs.width, spec_.conv1, spec_.ksize};
  auto h1 = t.relu(t.conv2d(x, t.param(*cw1_), t.param(*cb1_), m1));
  Tape::ConvMeta m2{spec_.conv1, spec_.obs.height, spec_.obs.width, spec_.conv2, spec_.ksize};
  auto h2 = t.relu(t.conv2d(h1, t.param(*cw2_), t.param(*cb2_), m2));
  auto out = leaky(t, cd_.forward(t, h2), spec_.leaky_slope);
  t.check_finite(out, "StateEncoder.conv");
  return out;
}

}  // namespace dpi
