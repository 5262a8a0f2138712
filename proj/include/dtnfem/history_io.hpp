#pragma once

#include <filesystem>
#include <ostream>

#include "dtnfem/adapt.hpp"

namespace dtnfem {

inline constexpr const char* kHistoryHeader = "iter,dof,cells,N,eps_N,eta,e_h,wall_time_s";

/// Header plus one line per row; e_h is left empty when unknown. Throws
/// IoError("nothing to export") for an empty history.
void write_csv(const ConvergenceHistory& history, std::ostream& out);
void export_csv(const ConvergenceHistory& history, const std::filesystem::path& path);

}  // namespace dtnfem
