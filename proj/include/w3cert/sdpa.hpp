#pragma once

// SDPA sparse format (.dat-s) for the moment relaxation.
//
// The free moments are the SDPA variables x_1..x_m (SDPA variables are
// unrestricted in sign). Block 1 is the moment matrix, block 2 a diagonal
// block with two slack rows per box constraint:
//   lower:  expr(x) - lower >= 0
//   upper:  upper - expr(x) >= 0
// Comment lines carry the word list, the objective constant and the exact
// constraint data so that a parsed file rebuilds the SdpProblem.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "w3cert/moments.hpp"

namespace w3cert {

struct SdpaEntry {
  int matrix = 0;  // 0 is F0
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;

  friend bool operator==(const SdpaEntry&, const SdpaEntry&) = default;
};

struct SdpaData {
  std::vector<std::string> comments;  // without the leading "* "
  int m = 0;
  std::vector<int> block_struct;      // negative size = diagonal block
  std::vector<double> c;
  std::vector<SdpaEntry> entries;

  friend bool operator==(const SdpaData&, const SdpaData&) = default;
};

std::string write_sdpa(const SdpaData& d);
/// Throws std::invalid_argument on malformed input.
SdpaData parse_sdpa(std::string_view text);

SdpaData to_sdpa(const SdpProblem& p);
/// Inverse of to_sdpa; needs the comment metadata written by to_sdpa.
SdpProblem from_sdpa(const SdpaData& d);

std::string export_sdpa(const SdpProblem& p);
/// Throws std::runtime_error if the file cannot be written.
void export_sdpa_file(const SdpProblem& p, const std::filesystem::path& path);

}  // namespace w3cert
