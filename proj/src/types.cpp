#include "chb/types.hpp"

#include <fmt/format.h>

#include <vector>

namespace chb {

ConfigError::ConfigError(const std::string& msg, int line, int column)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", line, column, msg) : msg), line_(line), column_(column) {}

ValidationError::ValidationError(std::string assumption, const std::string& msg)
    : std::runtime_error(msg), assumption_(std::move(assumption)) {}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double integrate(const Vec& w, const Vec& f) {
  const Vec p = w.cwiseProduct(f);
  return pairwise_sum(p.data(), static_cast<std::size_t>(p.size()));
}

}  // namespace chb
