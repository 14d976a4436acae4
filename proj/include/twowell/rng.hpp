#ifndef TWOWELL_RNG_HPP
#define TWOWELL_RNG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace twowell {

// Seeded generator with explicitly-coded distributions so that streams are
// reproducible across standard library implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; } // [0,1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    uint64_t integer(uint64_t n) { // [0, n)
        uint64_t x, lim = UINT64_MAX - UINT64_MAX % n;
        do { x = eng_(); } while (x >= lim);
        return x % n;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0, u2;
        while (u1 == 0.0) u1 = uniform();
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Eigen::Vector2d unit_vector() {
        double t = uniform(0.0, 2.0 * M_PI);
        return {std::cos(t), std::sin(t)};
    }

    // Uniform point in the disc of radius r around p.
    Eigen::Vector2d in_disc(const Eigen::Vector2d& p, double r) {
        double rad = r * std::sqrt(uniform());
        return p + rad * unit_vector();
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace twowell

#endif
