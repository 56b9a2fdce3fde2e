#include "plkg/baselines.hpp"

#include <string>

#include "plkg/error.hpp"

namespace plkg {

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "random") return BaselineKind::random;
  if (name == "oracle-svd") return BaselineKind::oracle_svd;
  throw ConfigError("unknown baseline kind '" + std::string(name) +
                    "' (expected random or oracle-svd)");
}

const char* to_string(BaselineKind kind) {
  return kind == BaselineKind::random ? "random" : "oracle-svd";
}

namespace {

CVec isotropic(std::size_t n, RngStream& rng) {
  CVec v = cgauss_vector(n, 1.0, rng);
  const double s = norm(v);
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace

BeamPair random_action(std::size_t n, RngStream& rng) {
  if (n < 1) throw ParameterError("random_action: n must be >= 1");
  BeamPair p;
  p.w_a = isotropic(n, rng);
  p.w_b = isotropic(n, rng);
  return p;
}

BeamPair oracle_action(const CMat& h_ab) {
  // Fixed start stream: the oracle is a deterministic function of H.
  RngStream start(0x0AC1E, h_ab.size());
  SingularTriple top = power_iteration_top_pair(h_ab, start);
  return {std::move(top.wa), std::move(top.wb)};
}

}  // namespace plkg
