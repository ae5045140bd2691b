#pragma once

namespace bandflow {

enum class BesselKind { J0, J1, Y0, Y1 };

/// Bessel functions of integer order 0 and 1 for z >= 0 (z > 0 for Y0, Y1).
/// Absolute error below 1e-10 on [1e-6, 200].
double bessel(BesselKind kind, double z);

inline double bessel_j0(double z) { return bessel(BesselKind::J0, z); }
inline double bessel_j1(double z) { return bessel(BesselKind::J1, z); }
inline double bessel_y0(double z) { return bessel(BesselKind::Y0, z); }
inline double bessel_y1(double z) { return bessel(BesselKind::Y1, z); }

} // namespace bandflow
