#pragma once

// Regression floors measured once on the fixtures and frozen at roughly
// half (or three quarters) of the measured value.
namespace floors {

// min over (b, k) != (0, 0) of eta on FIX-B at depth 8; measured 0.0513.
inline constexpr double gap_fix_b = 0.04;
// eta(5, 0) on FIX-A at depth 8; measured 0.1667.
inline constexpr double gap_fix_a_b5 = 0.12;
// lnic on FIX-A with omega = (1, 0), m2 = 3, 64 samples, seed 3; measured 0.0074.
inline constexpr double lnic_fix_a_tau = 0.0035;
// lnic on FIX-B over 16 omegas, same sampling; measured 0.00365.
inline constexpr double lnic_fix_b = 0.0018;
// ncp spread, 2e5 limit points (seed 7) and 8 centers (seed 11).
// FIX-A real direction measured 0.080; FIX-B both directions measured 0.019.
inline constexpr double ncp_fix_a_real = 0.04;
inline constexpr double ncp_fix_b = 0.009;

}  // namespace floors
