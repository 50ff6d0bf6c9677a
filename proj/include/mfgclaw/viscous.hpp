#pragma once

#include <string>

#include "mfgclaw/claw.hpp"

namespace mfgclaw {

struct ViscousField {
    Grid1D grid;
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    std::string scheme = "godunov_flux+central_diffusion";

    double value_at(double t, double x) const;
};

/// Explicit solve of d_t sigma + d_x F(sigma) = eps d_xx sigma on a domain
/// padded by lambda_max * T (plus a diffusive margin), with constant
/// extrapolation at the boundary. The advective flux is the Godunov one, so
/// interior mass is conserved to machine precision.
ViscousField viscous_solve(const ReducedFlux& flux, const Profile1D& s0, double eps,
                           double T, const Grid1D& grid,
                           std::vector<double> record_times = {});

struct ViscosityStudyRow {
    double epsilon = 0.0;
    double l1_distance = 0.0;
    double runtime_ms = 0.0;
};

/// L1_loc distance of the viscous solution at time T to a Godunov reference
/// computed at double resolution, over the central 80% of the padded domain.
std::vector<ViscosityStudyRow> vanishing_viscosity_study(const ReducedFlux& flux,
                                                         const Profile1D& s0,
                                                         const std::vector<double>& eps_list,
                                                         double T, const Grid1D& grid);

} // namespace mfgclaw
