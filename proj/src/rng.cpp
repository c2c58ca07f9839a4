#include "bosecycles/rng.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "bosecycles/errors.hpp"

namespace bosecycles {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(uint64_t seed) : engine_(seed) {}

Rng Rng::stream(uint64_t master_seed, uint64_t index) {
  return Rng(splitmix64(master_seed ^ splitmix64(index + 1)));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below needs n > 0");
  // rejection sampling keeps the result exactly uniform
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

void Rng::save(std::ostream& out) const {
  out << engine_ << '\n' << (has_spare_ ? 1 : 0) << ' ' << std::hexfloat << spare_
      << std::defaultfloat << '\n';
}

void Rng::load(std::istream& in) {
  in >> engine_;
  int flag = 0;
  std::string spare;
  in >> flag >> spare;
  if (!in) throw IoError("malformed RNG state");
  has_spare_ = flag != 0;
  spare_ = std::stod(spare);
}

bool Rng::operator==(const Rng& other) const {
  return engine_ == other.engine_ && has_spare_ == other.has_spare_ &&
         (!has_spare_ || spare_ == other.spare_);
}

}  // namespace bosecycles
