#include "dtnfem/history_io.hpp"

#include <fstream>
#include <iomanip>

namespace dtnfem {

void write_csv(const ConvergenceHistory& history, std::ostream& out) {
  if (history.empty()) throw IoError("nothing to export");
  out << kHistoryHeader << '\n' << std::setprecision(10);
  for (const auto& r : history.rows()) {
    out << r.iteration << ',' << r.dof << ',' << r.cells << ',' << r.truncation << ',' << r.eps_N << ',' << r.eta << ',';
    if (r.e_h) out << *r.e_h;
    out << ',' << r.wall_time << '\n';
  }
}

void export_csv(const ConvergenceHistory& history, const std::filesystem::path& path) {
  if (history.empty()) throw IoError("nothing to export");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(history, out);
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace dtnfem
