#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "torpath/geo.hpp"
#include "torpath/relay.hpp"

namespace testutil {

inline torpath::Relay relay(std::string id, double x, double y, double bw_kbps,
                            double uptime_s) {
  return {std::move(id), {x, y}, bw_kbps, uptime_s};
}

// chi-square critical values at p = 0.001 for the degrees of freedom the
// suites use; a statistic below the critical value is consistent with the
// hypothesized distribution at that level.
inline double chi2_crit_p001(int dof) {
  switch (dof) {
    case 1: return 10.828;
    case 2: return 13.816;
    case 4: return 18.467;
    case 5: return 20.515;
    case 49: return 85.351;
    default: break;
  }
  // Wilson-Hilferty approximation, z = 3.0902 at the 0.999 quantile.
  const double k = dof;
  const double z = 3.0902;
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

// Pearson statistic against explicit expected counts.
inline double chi2_statistic(const std::vector<std::uint64_t>& observed,
                             const std::vector<double>& expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double diff = static_cast<double>(observed[i]) - expected[i];
    stat += diff * diff / expected[i];
  }
  return stat;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / ("torpath_test_" + name);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write(const std::string& filename, const std::string& content) const {
    const auto p = path_ / filename;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
