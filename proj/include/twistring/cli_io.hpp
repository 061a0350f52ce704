#pragma once

// Solution files (JSON), CSV emitters, flag parsers and the command-line
// front end. File layouts are described in docs/formats.md.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twistring/continuation.hpp"
#include "twistring/errors.hpp"
#include "twistring/evolution.hpp"
#include "twistring/lattice_model.hpp"
#include "twistring/stability.hpp"

namespace twistring {

/// Malformed or unreadable input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

struct Provenance {
  std::string seed;                // e.g. "single:1"
  std::vector<std::string> path;   // one entry per continuation leg
};

struct SolutionFile {
  static constexpr int current_schema = 1;

  int schema_version = current_schema;
  LatticeConfig config;
  StandingWave wave;
  double residual_norm = 0.0;
  Provenance provenance;
};

/// Canonical JSON text (fixed key order, shortest round-trip doubles,
/// trailing newline).
std::string to_json(const SolutionFile& s);
SolutionFile solution_from_json(std::string_view text);

void write_solution(const std::filesystem::path& path, const SolutionFile& s);
SolutionFile read_solution(const std::filesystem::path& path);

// CSV emitters. Every file starts with one header line.
void write_branch_csv(std::ostream& os, const Branch& b);
void write_spectrum_csv(std::ostream& os, const Spectrum& s);
void write_trajectory_csv(std::ostream& os, const Trajectory& t);
void write_scan_csv(std::ostream& os, std::span<const PhiScanRow> rows);
void write_k0_csv(std::ostream& os, const K0Sweep& sweep);

/// "pi/N", "pi/<int>", "<int>pi/<int>", "pi" or a decimal number.
double parse_phi(std::string_view text, std::size_t n_sites);

struct SeedSpec {
  std::vector<std::size_t> excited;  // 0-based
  std::string text;
};

/// "single:i", "adjacent:i" (sites i and i+1, cyclic) or "double:i,j"; 1-based.
SeedSpec parse_seed(std::string_view text, std::size_t n_sites);

/// "a:step:b", inclusive of b up to rounding.
std::vector<double> parse_range(std::string_view text);

std::vector<double> parse_list(std::string_view text);

struct PerturbSpec {
  std::size_t node = 0;  // 0-based
  double amplitude = 0.0;
};

/// "node=i,amp=d" with 1-based i.
PerturbSpec parse_perturb(std::string_view text, std::size_t n_sites);

/// TWISTRING_THREADS if set (a positive integer), else the hardware
/// concurrency; at least 1.
unsigned threads_from_env();

/// Entry point of the `twistring` tool. Returns the process exit code:
/// 0 success, 1 non-convergence, 2 bad flags or input file, 3 diverged
/// evolution.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twistring
