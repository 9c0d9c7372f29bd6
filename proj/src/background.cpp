#include "tzitzeica/background.hpp"

#include <cmath>

#include "tzitzeica/errors.hpp"

namespace tz::background {

void BackgroundData::validate() const {
  if (genus < 0) throw ConfigError("background genus must be non-negative");
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
    throw ConfigError("background constant c must be finite");
  if (genus == 0) {
    if (U.size() != 0 || V.size() != 0 || zD.size() != 0 || prym)
      throw ConfigError("genus-0 background takes no U, V, zD or prym data");
    return;
  }
  if (U.size() != genus || V.size() != genus || zD.size() != genus)
    throw ConfigError("background vectors U, V, zD must have length genus");
  if (!prym || prym->genus() != genus)
    throw ConfigError("background prym matrix must be genus x genus");
  policy.validate();
}

cplx exp_v(const BackgroundData& data, double x, double t) {
  if (data.genus == 0) return data.c;
  const Eigen::VectorXcd z = data.U * x + data.V * t + data.zD;
  return data.c - 2.0 * theta::theta_log_d2(z, *data.prym, data.U, data.V, data.policy);
}

FieldGrid v_field(const BackgroundData& data, const GridSpec& grid, int threads) {
  data.validate();
  return sample_field(BackgroundField(data), grid, threads);
}

bool sampled_real_positive(const BackgroundData& data, const GridSpec& grid, double tol) {
  grid.validate();
  for (int j = 0; j < grid.nt; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const cplx ev = exp_v(data, grid.x(i), grid.t(j));
      if (!(ev.real() > 0.0) || std::abs(ev.imag()) > tol * std::abs(ev)) return false;
    }
  return true;
}

}  // namespace tz::background
