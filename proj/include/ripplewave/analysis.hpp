#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ripplewave/pde_sim.hpp"
#include "ripplewave/wave_construction.hpp"

namespace ripple {

enum class FieldKind { u, v, u1, v1, u1_over_u, v1_over_v };

const char* to_string(FieldKind f);
FieldKind field_from_string(const std::string& s);

/// The requested field per cell. Fractions are NaN where the density is
/// below 1e-12.
std::vector<double> extract_field(const FieldState& s, FieldKind f);

struct WaveMeasurement {
  double speed = 0.0;
  double speed_ci = 0.0;          // max deviation of a pairwise speed from the fit
  std::vector<double> profile;    // comoving mean, aligned with the first snapshot
  bool is_traveling = false;
  double comoving_rms = 0.0;      // RMS deviation from the comoving mean / range
  double periodicity_error = 0.0; // max |last aligned - first| / range
  double range = 0.0;
  double dx = 0.0;
  std::vector<double> times;
  std::vector<double> shifts;     // cumulative shift in length units
};

/// Speed from circular cross-correlation of consecutive snapshots with
/// parabolic peak refinement and a least-squares fit of the cumulative shift.
/// Needs at least 10 snapshots. Throws UsageError otherwise.
WaveMeasurement measure_wave_speed(const std::vector<FieldState>& snapshots, FieldKind field,
                                   const Grid& g);

/// Measure from raw per-snapshot fields (same layout as extract_field).
WaveMeasurement measure_wave_speed(const std::vector<std::vector<double>>& fields,
                                   const std::vector<double>& times, const Grid& g);

struct ComparisonReport {
  double l1_error = 0.0;     // mean absolute difference over compared cells
  double linf_error = 0.0;
  double relative_l1 = 0.0;  // l1 / amplitude of the constructed profile
  double amplitude = 0.0;
  double optimal_shift = 0.0;
  int compared_cells = 0;
  std::vector<std::pair<double, double>> jump_alignment;  // (constructed x, measured x)
};

/// Compares cell averages of the constructed P with a measured profile of
/// one domain after the best circular shift. Cells within exclude_cells of
/// a constructed jump are skipped. Throws UsageError if the domain is not a
/// whole number of periods to within 5%.
ComparisonReport compare_profiles(const AdmissibleWave& wave, const std::vector<double>& measured,
                                  double length, int exclude_cells = 3);

struct PlateauFit {
  std::vector<double> levels;  // ascending
  double range = 0.0;
  double rms_residual = 0.0;   // RMS distance to the nearest level
  double relative_residual = 0.0;
};

/// Plateau heights from histogram modes (bin width 0.5% of the range).
PlateauFit plateau_levels(const std::vector<double>& field, int max_levels = 2);

struct SwitchEstimate {
  double up_jump = 0.0;    // x of the trough -> crest jump
  double down_jump = 0.0;  // x of the crest -> trough jump
  double crest_length = 0.0;
};

/// Locations of the steepest rise and steepest fall of a one-period profile.
SwitchEstimate estimate_switch_points(const std::vector<double>& profile, double length);

}  // namespace ripple
