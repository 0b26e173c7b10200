#include "haddm/report.hpp"

#include <cstdio>
#include <fstream>

#include "haddm/errors.hpp"

namespace haddm {

namespace {

std::string round_trip(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json complex_pair(std::complex<double> z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_pair(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("report/write_sweep_csv", "cannot open " + path);

  out << result.axis_name;
  for (const Series& s : result.series)
    out << "," << s.name << "," << s.name << "_se";
  out << "\r\n";

  for (std::size_t i = 0; i < result.axis.size(); ++i) {
    out << round_trip(result.axis[i]);
    for (const Series& s : result.series) {
      if (s.points.size() != result.axis.size())
        throw Error("report/write_sweep_csv",
                    "series " + s.name + " length does not match the axis");
      out << "," << round_trip(s.points[i].mean) << ","
          << round_trip(s.points[i].std_error);
    }
    out << "\r\n";
  }
  if (!out) throw Error("report/write_sweep_csv", "write failed for " + path);
}

nlohmann::json sweep_to_json(const SweepResult& result) {
  nlohmann::json j;
  j["axis_name"] = result.axis_name;
  j["axis"] = result.axis;
  nlohmann::json series = nlohmann::json::object();
  for (const Series& s : result.series) {
    nlohmann::json entry;
    nlohmann::json mean = nlohmann::json::array();
    nlohmann::json se = nlohmann::json::array();
    nlohmann::json n = nlohmann::json::array();
    for (const SeriesPoint& p : s.points) {
      mean.push_back(p.mean);
      se.push_back(p.std_error);
      n.push_back(p.n);
    }
    entry["mean"] = std::move(mean);
    entry["std_error"] = std::move(se);
    entry["n"] = std::move(n);
    series[s.name] = std::move(entry);
  }
  j["series"] = std::move(series);
  j["info"] = result.info;
  return j;
}

nlohmann::json beamformer_to_json(const HybridBeamformer& bf) {
  nlohmann::json j;
  j["beta"] = bf.beta;
  j["analog"] = matrix_to_json(bf.analog.assemble());
  nlohmann::json v = nlohmann::json::array();
  for (Eigen::Index i = 0; i < bf.v_bb.size(); ++i)
    v.push_back(complex_pair(bf.v_bb(i)));
  j["v_bb"] = std::move(v);
  j["t_bb"] = matrix_to_json(bf.t_bb);
  return j;
}

}  // namespace haddm
