#include "nqs/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <stdexcept>

namespace nqs {

const char* kCurveHeader =
    "epoch,energy_re,energy_im,energy_std,norm_energy,acceptance,lambda";
const char* kSummaryHeader =
    "sweep_value,instance,final_norm_energy,epochs,wall_time";

void save_gsvec(const std::vector<double>& amplitudes, const BasisSector& s,
                const std::string& path) {
  if (amplitudes.size() != s.size)
    throw std::invalid_argument("amplitude vector does not match the sector");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::uint32_t n = s.n_sites;
  const std::uint32_t kind = s.kind == SectorKind::Full ? 0u : 1u;
  const std::uint64_t size = s.size;
  bool ok = std::fwrite(&n, sizeof(n), 1, f) == 1;
  ok = ok && std::fwrite(&kind, sizeof(kind), 1, f) == 1;
  ok = ok && std::fwrite(&size, sizeof(size), 1, f) == 1;
  ok = ok && std::fwrite(amplitudes.data(), sizeof(double), amplitudes.size(),
                         f) == amplitudes.size();
  std::fclose(f);
  if (!ok) throw std::runtime_error("short write to '" + path + "'");
}

std::pair<std::vector<double>, BasisSector> load_gsvec(
    const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::uint32_t n = 0, kind = 0;
  std::uint64_t size = 0;
  bool ok = std::fread(&n, sizeof(n), 1, f) == 1 &&
            std::fread(&kind, sizeof(kind), 1, f) == 1 &&
            std::fread(&size, sizeof(size), 1, f) == 1;
  if (!ok) {
    std::fclose(f);
    throw std::runtime_error("truncated gsvec '" + path + "'");
  }
  const BasisSector sector = make_sector(
      kind == 0 ? SectorKind::Full : SectorKind::ZeroMagnetization, n);
  if (sector.size != size) {
    std::fclose(f);
    throw std::runtime_error("gsvec header size mismatch in '" + path + "'");
  }
  std::vector<double> v(size);
  ok = std::fread(v.data(), sizeof(double), size, f) == size;
  std::fclose(f);
  if (!ok) throw std::runtime_error("truncated gsvec '" + path + "'");
  return {std::move(v), sector};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_curve_csv(const LearningCurve& curve, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  std::fprintf(f, "%s\n", kCurveHeader);
  for (const auto& r : curve)
    std::fprintf(f, "%u,%s,%s,%s,%s,%s,%s\n", r.epoch,
                 format_double(r.energy.real()).c_str(),
                 format_double(r.energy.imag()).c_str(),
                 format_double(r.energy_std).c_str(),
                 format_double(r.norm_energy).c_str(),
                 format_double(r.acceptance).c_str(),
                 format_double(r.lambda).c_str());
  std::fclose(f);
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  std::fprintf(f, "%s\n", kSummaryHeader);
  for (const auto& r : rows)
    std::fprintf(f, "%s,%u,%s,%u,%s\n", format_double(r.sweep_value).c_str(),
                 r.instance, format_double(r.final_norm_energy).c_str(),
                 r.epochs, format_double(r.wall_time).c_str());
  std::fclose(f);
}

std::string fnv1a_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  unsigned char buf[8192];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0)
    for (std::size_t i = 0; i < got; ++i) {
      h ^= buf[i];
      h *= 0x100000001b3ULL;
    }
  std::fclose(f);
  char out[24];
  std::snprintf(out, sizeof(out), "%016" PRIx64, h);
  return out;
}

}  // namespace nqs
