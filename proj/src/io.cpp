#include "veflow/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>

#include "veflow/errors.hpp"

namespace veflow {

namespace {

struct File {
  std::FILE* f{nullptr};
  explicit File(const std::string& path) : f(std::fopen(path.c_str(), "w")) {
    if (f == nullptr) throw IoError("cannot open for writing: " + path);
  }
  ~File() {
    if (f != nullptr) std::fclose(f);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
};

}  // namespace

void write_polyline(const std::string& path, const PolygonalCurve& curve) {
  File out(path);
  std::fprintf(out.f, "# closed polyline, %d vertices\n", curve.size());
  for (int k = 0; k < curve.size(); ++k)
    std::fprintf(out.f, "%d %.17g %.17g\n", k, curve.vertices[k].x(),
                 curve.vertices[k].y());
}

void write_vtk(const std::string& path, const StateFields& state) {
  const DiscreteStep& step = *state.step;
  const Triangulation& mesh = step.mesh;
  File out(path);
  std::fprintf(out.f, "# vtk DataFile Version 3.0\n");
  std::fprintf(out.f, "two-phase viscoelastic flow snapshot\n");
  std::fprintf(out.f, "ASCII\nDATASET UNSTRUCTURED_GRID\n");
  std::fprintf(out.f, "POINTS %d double\n", mesh.n_vertices());
  for (const Vec2& v : mesh.vertices)
    std::fprintf(out.f, "%.17g %.17g 0\n", v.x(), v.y());
  std::fprintf(out.f, "CELLS %d %d\n", mesh.n_triangles(),
               4 * mesh.n_triangles());
  for (const auto& t : mesh.triangles)
    std::fprintf(out.f, "3 %d %d %d\n", t[0], t[1], t[2]);
  std::fprintf(out.f, "CELL_TYPES %d\n", mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) std::fprintf(out.f, "5\n");

  std::fprintf(out.f, "CELL_DATA %d\n", mesh.n_triangles());
  std::fprintf(out.f, "SCALARS classification int 1\nLOOKUP_TABLE default\n");
  for (int t = 0; t < mesh.n_triangles(); ++t)
    std::fprintf(out.f, "%d\n", static_cast<int>(step.cls.cls[t]));
  std::fprintf(out.f, "SCALARS density double 1\nLOOKUP_TABLE default\n");
  for (int t = 0; t < mesh.n_triangles(); ++t)
    std::fprintf(out.f, "%.17g\n", step.sweep.rho[t]);
  std::fprintf(out.f, "SCALARS viscosity double 1\nLOOKUP_TABLE default\n");
  for (int t = 0; t < mesh.n_triangles(); ++t)
    std::fprintf(out.f, "%.17g\n", step.sweep.mu[t]);

  std::fprintf(out.f, "POINT_DATA %d\n", mesh.n_vertices());
  std::fprintf(out.f, "VECTORS velocity double\n");
  for (int v = 0; v < mesh.n_vertices(); ++v)
    std::fprintf(out.f, "%.17g %.17g 0\n", state.u[step.uspace.dof(v, 0)],
                 state.u[step.uspace.dof(v, 1)]);
  std::fprintf(out.f, "SCALARS pressure double 1\nLOOKUP_TABLE default\n");
  // The pressure vector is pressure-block local: [P1][P0][xfem][multiplier].
  const double xfem_coeff =
      step.pspace.with_xfem ? state.p[step.pspace.xfem_dof()] : 0.0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    double p = state.p[v];
    if (step.pspace.with_xfem && point_inside_curve(step.curve,
                                                    mesh.vertices[v]))
      p += xfem_coeff;
    std::fprintf(out.f, "%.17g\n", p);
  }
  const char* names[3] = {"B11", "B12", "B22"};
  for (int c = 0; c < 3; ++c) {
    std::fprintf(out.f, "SCALARS %s double 1\nLOOKUP_TABLE default\n",
                 names[c]);
    for (int v = 0; v < mesh.n_vertices(); ++v)
      std::fprintf(out.f, "%.17g\n", state.b.coeffs[step.bspace.dof(v, c)]);
  }
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& series) {
  File out(path);
  std::fprintf(out.f,
               "t,E_kin,E_el,E_int,E_total,D,V_c,y_c,circ,vol_loss,r,"
               "fp_iters,min_eig_B\n");
  for (const auto& row : series)
    std::fprintf(out.f,
                 "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                 "%.17g,%.17g,%d,%.17g\n",
                 row.t, row.e_kin, row.e_el, row.e_int, row.e_total,
                 row.dissipation, row.v_c, row.y_c, row.circ, row.vol_loss,
                 row.r, row.fp_iters, row.min_eig_b);
}

OutputWriter::OutputWriter(std::string out_dir) : dir(std::move(out_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
}

void OutputWriter::snapshot(int step_index, const StateFields& state) const {
  char name[64];
  std::snprintf(name, sizeof(name), "/interface_%06d.poly", step_index);
  write_polyline(dir + name, state.curve);
  std::snprintf(name, sizeof(name), "/bulk_%06d.vtk", step_index);
  write_vtk(dir + name, state);
}

void OutputWriter::diagnostics(const std::vector<DiagnosticsRow>& series) const {
  write_diagnostics_csv(dir + "/diagnostics.csv", series);
}

}  // namespace veflow
