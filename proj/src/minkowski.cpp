#include "fokker/minkowski.hpp"

#include <ostream>

namespace fokker {

double component_norm(const FourVector& a) {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
}

std::ostream& operator<<(std::ostream& os, const FourVector& v) {
  return os << '(' << v[0] << ", " << v[1] << ", " << v[2] << ", " << v[3] << ')';
}

}  // namespace fokker
