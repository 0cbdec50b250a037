#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nqs/basis.hpp"
#include "nqs/optimizer.hpp"

namespace nqs {

// Ground-state vector dump: little-endian {u32 N, u32 kind, u64 size} header
// plus doubles in canonical sector order.
void save_gsvec(const std::vector<double>& amplitudes, const BasisSector&,
                const std::string& path);
std::pair<std::vector<double>, BasisSector> load_gsvec(const std::string& path);

// curve.csv: epoch,energy_re,energy_im,energy_std,norm_energy,acceptance,lambda
extern const char* kCurveHeader;
void write_curve_csv(const LearningCurve&, const std::string& path);

// summary.csv: sweep_value,instance,final_norm_energy,epochs,wall_time
extern const char* kSummaryHeader;
struct SummaryRow {
  double sweep_value = 0.0;
  unsigned instance = 0;
  double final_norm_energy = 0.0;
  unsigned epochs = 0;
  double wall_time = 0.0;
};
void write_summary_csv(const std::vector<SummaryRow>&, const std::string& path);

// Deterministic shortest round-trip formatting used in every CSV.
std::string format_double(double v);

// FNV-1a 64 of a file's bytes, hex-encoded; used for manifest artifact hashes.
std::string fnv1a_file(const std::string& path);

}  // namespace nqs
