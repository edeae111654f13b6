#include "smoothnorm/sampling.hpp"

#include "smoothnorm/error.hpp"

namespace smoothnorm {

Vector gaussian_vector(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (double& c : v) c = normal(rng);
  return v;
}

Vector sphere_sample(const ModelSpace& space, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector v = gaussian_vector(rng, space.dim());
    const double n = space.norm(v);
    if (n > 0.0) {
      for (double& c : v) c /= n;
      return v;
    }
  }
  throw NumericError("sphere_sample: could not draw a nonzero direction");
}

std::vector<Vector> sphere_samples(const ModelSpace& space, std::size_t count, std::uint64_t seed,
                                   std::uint64_t stream) {
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = sample_rng(seed, stream, i);
    out.push_back(sphere_sample(space, rng));
  }
  return out;
}

}  // namespace smoothnorm
