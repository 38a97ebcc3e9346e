#include "artifacts.hpp"

#include <filesystem>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace mpsenc::cli {

using nlohmann::json;

void write_mps_json(const Mps& m, std::ostream& os) {
  json out;
  out["schema_version"] = 1;
  out["n_qubits"] = m.n_qubits();
  out["canonical_center"] = m.canonical_center;
  json schmidt = json::array();
  for (const auto& lam : m.schmidt) {
    json v = json::array();
    for (Eigen::Index i = 0; i < lam.size(); ++i) v.push_back(lam(i));
    schmidt.push_back(std::move(v));
  }
  out["schmidt"] = std::move(schmidt);
  json sites = json::array();
  for (const auto& s : m.sites) {
    json site;
    for (int p = 0; p < 2; ++p) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < s.m[p].rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < s.m[p].cols(); ++c)
          row.push_back(json::array({s.m[p](r, c).real(), s.m[p](r, c).imag()}));
        rows.push_back(std::move(row));
      }
      site[p == 0 ? "m0" : "m1"] = std::move(rows);
    }
    sites.push_back(std::move(site));
  }
  out["sites"] = std::move(sites);
  os << out.dump(1) << '\n';
}

Mps read_mps_json(std::istream& is) {
  json in = json::parse(is);
  if (in.value("schema_version", 0) != 1)
    throw std::invalid_argument("mps artifact: unsupported schema_version");
  Mps m;
  m.canonical_center = in.at("canonical_center").get<int>();
  for (const auto& v : in.at("schmidt")) {
    Eigen::VectorXd lam(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) lam(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    m.schmidt.push_back(std::move(lam));
  }
  for (const auto& site : in.at("sites")) {
    Mps::Site s;
    for (int p = 0; p < 2; ++p) {
      const auto& rows = site.at(p == 0 ? "m0" : "m1");
      Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
      Eigen::Index nc = nr > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
      s.m[p].resize(nr, nc);
      for (Eigen::Index r = 0; r < nr; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != nc)
          throw std::invalid_argument("mps artifact: ragged site matrix");
        for (Eigen::Index c = 0; c < nc; ++c)
          s.m[p](r, c) = cplx(row[static_cast<std::size_t>(c)][0].get<double>(),
                              row[static_cast<std::size_t>(c)][1].get<double>());
      }
    }
    if (s.m[0].rows() != s.m[1].rows() || s.m[0].cols() != s.m[1].cols())
      throw std::invalid_argument("mps artifact: physical index shape mismatch");
    m.sites.push_back(std::move(s));
  }
  if (m.sites.empty()) throw std::invalid_argument("mps artifact: no sites");
  int n = static_cast<int>(m.sites.size());
  if (m.canonical_center >= 1 && !m.schmidt.empty() &&
      static_cast<int>(m.schmidt.size()) != n - 1)
    throw std::invalid_argument("mps artifact: schmidt vector count mismatch");
  return m;
}

void write_prediction_csv(double g1_value, double g2_value, int n_qubits, std::ostream& os) {
  os.precision(17);
  os << "bond k,lam0_pred,lam1_pred,lam2_pred,p_pred,in_window\n";
  for (int k = 1; k < n_qubits; ++k) {
    SpectrumPrediction sp = predicted_spectrum(g1_value, g2_value, k);
    os << k << ',' << sp.lam0 << ',' << sp.lam1 << ',' << sp.lam2 << ',' << sp.p << ','
       << (sp.in_window ? 1 : 0) << '\n';
  }
}

void write_plotdata_csv(const Histogram& h, const DistributionSpec& dist, std::ostream& os) {
  const double r2 = distribution_cdf(dist, dist.L) - distribution_cdf(dist, 0.0);
  if (!(r2 > 0.0)) throw std::invalid_argument("plotdata: distribution has no mass on [0, L]");
  os.precision(17);
  os << "bitstring,x,count,ideal_pdf\n";
  const int n = h.grid.n_qubits;
  for (const auto& [idx, count] : h.counts) {
    double x = h.grid.x_of_index(idx);
    std::string bits(static_cast<std::size_t>(n), '0');
    for (int b = 0; b < n; ++b)
      if ((idx >> (n - 1 - b)) & 1ull) bits[static_cast<std::size_t>(b)] = '1';
    os << bits << ',' << x << ',' << count << ',' << distribution_pdf(dist, x) / r2 << '\n';
  }
}

std::string out_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  std::filesystem::create_directories(dir);
  char sep = dir.back() == '/' ? '\0' : '/';
  return sep ? dir + sep + name : dir + name;
}

}  // namespace mpsenc::cli
