#include "rlp/lp_export.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rlp::lp {

namespace {

std::string col_name(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "X%07zu", j);
  return buf;
}
std::string row_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "C%07zu", i);
  return buf;
}

std::string num(const Rational& v) { return format_double(to_double(v)); }

// one generic row-wise view shared by both writers
struct RowEntry {
  std::size_t row;
  std::size_t col;
  Rational value;
};

struct View {
  bool maximize = false;
  std::size_t n = 0, m = 0;
  std::vector<Rational> c;
  std::vector<Rational> rhs;
  std::vector<char> rel;  // 'L', 'G', 'E'
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows;
  std::vector<std::string> col_original;
};

View view_of(const DualFormLp& lp) {
  View v;
  v.n = static_cast<std::size_t>(lp.cols());
  v.m = static_cast<std::size_t>(lp.rows());
  v.c.resize(v.n);
  for (std::size_t j = 0; j < v.n; ++j)
    v.c[j] = lp.c[static_cast<Eigen::Index>(j)];
  v.rhs.resize(v.m);
  v.rel.assign(v.m, 'L');
  for (std::size_t i = 0; i < v.m; ++i)
    v.rhs[i] = lp.b[static_cast<Eigen::Index>(i)];
  v.rows.resize(v.m);
  for (Eigen::Index j = 0; j < lp.A.outerSize(); ++j)
    for (RatSparse::InnerIterator it(lp.A, j); it; ++it)
      v.rows[static_cast<std::size_t>(it.row())].emplace_back(
          static_cast<std::size_t>(j), it.value());
  for (std::size_t j = 0; j < v.n; ++j)
    v.col_original.push_back(j < lp.col_names.size()
                                 ? to_string(lp.col_names[j])
                                 : col_name(j));
  return v;
}

View view_of(const grounder::GroundLp& lp) {
  View v;
  v.maximize = lp.maximize;
  v.n = lp.var_names.size();
  v.m = lp.rows.size();
  v.c = lp.c;
  v.rows.resize(v.m);
  v.rhs.resize(v.m);
  v.rel.resize(v.m);
  for (std::size_t i = 0; i < v.m; ++i) {
    const auto& r = lp.rows[i];
    v.rhs[i] = r.rhs;
    v.rel[i] = r.rel == lang::RelOp::Le ? 'L'
               : r.rel == lang::RelOp::Ge ? 'G'
                                          : 'E';
    for (const auto& [col, val] : r.expr.coeffs)
      v.rows[i].emplace_back(static_cast<std::size_t>(col), val);
  }
  for (const Atom& a : lp.var_names) v.col_original.push_back(to_string(a));
  return v;
}

ExportResult write_lp_format(const View& v) {
  ExportResult out;
  std::ostringstream os;
  os << "\\ generated by rlplift\n";
  os << (v.maximize ? "Maximize\n" : "Minimize\n");
  os << " obj:";
  bool any = false;
  for (std::size_t j = 0; j < v.n; ++j) {
    if (v.c[j] == 0) continue;
    double cv = to_double(v.c[j]);
    os << (cv < 0 ? " - " : (any ? " + " : " ")) << format_double(std::abs(cv))
       << " " << col_name(j);
    any = true;
  }
  if (!any) os << " 0 " << (v.n ? col_name(0) : "X0000000");
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < v.m; ++i) {
    os << " " << row_name(i) << ":";
    bool first = true;
    for (const auto& [j, val] : v.rows[i]) {
      double av = to_double(val);
      os << (av < 0 ? " - " : (first ? " " : " + "))
         << format_double(std::abs(av)) << " " << col_name(j);
      first = false;
    }
    if (first) os << " 0 " << col_name(0);
    os << (v.rel[i] == 'L' ? " <= " : v.rel[i] == 'G' ? " >= " : " = ")
       << num(v.rhs[i]) << "\n";
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < v.n; ++j) os << " " << col_name(j) << " free\n";
  os << "End\n";
  out.text = os.str();
  for (std::size_t j = 0; j < v.n; ++j)
    out.name_map.emplace(col_name(j), v.col_original[j]);
  return out;
}

void mps_field(std::ostringstream& os, const std::string& a,
               const std::string& b, const std::string& c = "",
               const std::string& d = "", const std::string& e = "") {
  // fixed-format field starts at columns 2, 5, 15, 25, 40, 50
  std::string line(1, ' ');
  auto put = [&line](std::size_t pos, const std::string& s) {
    if (line.size() < pos) line.resize(pos, ' ');
    line += s;
  };
  put(1, a);
  put(4, b);
  if (!c.empty()) put(14, c);
  if (!d.empty()) put(24, d);
  if (!e.empty()) put(39, e);
  os << line << "\n";
}

ExportResult write_mps(const View& v) {
  ExportResult out;
  std::ostringstream os;
  os << "NAME          RLPLIFT\n";
  if (v.maximize) os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n";
  mps_field(os, "N", "COST");
  for (std::size_t i = 0; i < v.m; ++i)
    mps_field(os, std::string(1, v.rel[i]), row_name(i));
  os << "COLUMNS\n";
  // column-major entries: objective first, then rows in index order
  std::vector<std::vector<std::pair<std::size_t, Rational>>> cols(v.n);
  for (std::size_t i = 0; i < v.m; ++i)
    for (const auto& [j, val] : v.rows[i]) cols[j].emplace_back(i, val);
  for (std::size_t j = 0; j < v.n; ++j) {
    if (v.c[j] != 0) mps_field(os, "", col_name(j), "COST", num(v.c[j]));
    for (const auto& [i, val] : cols[j])
      mps_field(os, "", col_name(j), row_name(i), num(val));
    if (v.c[j] == 0 && cols[j].empty())
      mps_field(os, "", col_name(j), "COST", "0");
  }
  os << "RHS\n";
  for (std::size_t i = 0; i < v.m; ++i)
    if (v.rhs[i] != 0) mps_field(os, "", "RHS", row_name(i), num(v.rhs[i]));
  os << "BOUNDS\n";
  for (std::size_t j = 0; j < v.n; ++j)
    mps_field(os, "FR", "BND", col_name(j));
  os << "ENDATA\n";
  out.text = os.str();
  for (std::size_t j = 0; j < v.n; ++j)
    out.name_map.emplace(col_name(j), v.col_original[j]);
  return out;
}

}  // namespace

std::string ExportResult::name_map_json() const {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : name_map) j[k] = v;
  return j.dump(2);
}

ExportResult export_lp(const DualFormLp& lp, ExportFormat fmt) {
  View v = view_of(lp);
  return fmt == ExportFormat::LpFile ? write_lp_format(v) : write_mps(v);
}

ExportResult export_lp(const grounder::GroundLp& lp, ExportFormat fmt) {
  View v = view_of(lp);
  return fmt == ExportFormat::LpFile ? write_lp_format(v) : write_mps(v);
}

ExternalSolve solve_external(const std::string& cmd, const DualFormLp& lp) {
  ExternalSolve res;
  ExportResult exp = export_lp(lp, ExportFormat::Mps);

  char dir_template[] = "/tmp/rlplift.XXXXXX";
  const char* dir = mkdtemp(dir_template);
  if (!dir) {
    res.error = "cannot create scratch directory";
    return res;
  }
  std::string problem = std::string(dir) + "/problem.mps";
  std::string solution = std::string(dir) + "/solution.txt";
  {
    std::ofstream f(problem);
    f << exp.text;
  }
  std::string full = cmd + " " + problem + " " + solution;
  int rc = std::system(full.c_str());
  if (rc != 0) {
    res.error = "external solver exited with status " + std::to_string(rc);
    return res;
  }
  std::ifstream in(solution);
  if (!in) {
    res.error = "external solver produced no solution file";
    return res;
  }
  std::map<std::string, double> values;
  std::string name;
  double value;
  while (in >> name >> value) values[name] = value;
  res.x = Eigen::VectorXd::Zero(lp.cols());
  for (Eigen::Index j = 0; j < lp.cols(); ++j) {
    auto it = values.find(col_name(static_cast<std::size_t>(j)));
    if (it != values.end()) res.x[j] = it->second;
  }
  res.ok = true;
  std::remove(problem.c_str());
  std::remove(solution.c_str());
  std::remove(dir);
  return res;
}

}  // namespace rlp::lp
