#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

namespace sbd {

// Neumaier-compensated accumulator; keeps long sums accurate to a few ulp
// regardless of N.
class KahanSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

inline double compensated_sum(std::span<const double> xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

inline double mean_of(std::span<const double> xs) {
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

// Shortest round-trip decimal form (std::to_chars); parse helpers reject
// trailing junk. Shared by the CSV writers and JSON-adjacent text output.
std::string format_double(double v);
bool parse_double(std::string_view text, double& out);
bool parse_int64(std::string_view text, long long& out);

} // namespace sbd
