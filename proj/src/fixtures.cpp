#include "frameflow/fixtures.hpp"

namespace frameflow {

SchottkyScheme fixture_a() {
    return SchottkyScheme::from_pairings({{Complex(-3.0, 0.0), Complex(3.0, 0.0), 0.6},
                                          {Complex(-1.0, 0.0), Complex(1.0, 0.0), 0.35}});
}

SchottkyScheme fixture_b() {
    return SchottkyScheme::from_pairings({{Complex(-3.0, 0.0), Complex(3.0, 0.0), 0.6},
                                          {Complex(0.0, -1.5), Complex(0.0, 1.5), 0.6}});
}

}  // namespace frameflow
