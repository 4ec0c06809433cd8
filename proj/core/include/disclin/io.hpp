#pragma once

#include <filesystem>
#include <string>

#include "disclin/curvature.hpp"
#include "disclin/grid.hpp"
#include "disclin/params.hpp"
#include "disclin/solver.hpp"

namespace disclin {

// Shortest decimal round-tripping to the same double.
std::string format_g(double x);

// Compact tag for embedding h in file names (e.g. 0.05 -> "0.05").
std::string h_tag(double h);

// Writes via a temporary in the same directory plus rename, so readers never
// observe a partial file.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

// Field CSVs carry a comment header
//   # disclin <version> fields
//   # model=<m> h=<h> delta=<d> n_r=<n> n_phi=<m> r_min=<r>
// followed by r,phi,<components> rows in r-major node order.
void write_fields_csv(const std::filesystem::path& path, const Params& p, const PolarGrid& g,
                      const FvkState& s);
void write_fields_csv(const std::filesystem::path& path, const Params& p, const PolarGrid& g,
                      const Map3& y);

struct FieldsFile {
  Params params;
  int n_r = 0;
  int n_phi = 0;
  double r_min = 0.0;
  FvkState fvk;  // populated for Model::kFvk
  Map3 plate;    // populated for Model::kPlate

  PolarGrid grid() const { return {n_r, n_phi, r_min}; }
};

FieldsFile read_fields_csv(const std::filesystem::path& path);

// Columns r,kappa,target,abs_dev.
void write_kappa_csv(const std::filesystem::path& path, const Params& p,
                     const CurvatureProfile& prof);

}  // namespace disclin
