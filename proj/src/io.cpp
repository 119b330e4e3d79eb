#include "recov/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace recov {

Json real_to_json(double x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  return x;
}

double real_from_json(const Json& j)
{
  if (j.is_number())
    return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf")
      return std::numeric_limits<double>::infinity();
    if (s == "-inf")
      return -std::numeric_limits<double>::infinity();
    if (s == "nan")
      return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a real number, got " + j.dump());
}

Json matrix_to_json(const ComplexMatrix& m)
{
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      out.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
  return out;
}

ComplexMatrix matrix_from_json(const Json& j, Index rows, Index cols)
{
  if (!j.is_array() || static_cast<Index>(j.size()) != rows * cols)
    throw std::invalid_argument("matrix: expected " + std::to_string(rows * cols) +
                                " [re, im] entries");
  ComplexMatrix m(rows, cols);
  for (Index k = 0; k < rows * cols; ++k) {
    const Json& e = j[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw std::invalid_argument("matrix: entries must be [re, im] number pairs");
    m(k / cols, k % cols) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

namespace {

DimVector dims_from_json(const Json& j, const char* what)
{
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string(what) + ": dims must be a non-empty array");
  DimVector dims;
  for (const auto& d : j) {
    if (!d.is_number_integer() || d.get<long long>() < 1)
      throw std::invalid_argument(std::string(what) + ": dims must be positive integers");
    dims.push_back(d.get<Index>());
  }
  return dims;
}

const Json& field(const Json& j, const char* key, const char* what)
{
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(std::string(what) + ": missing field '" + key + "'");
  return j.at(key);
}

Index positive_index(const Json& j, const char* what)
{
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw std::invalid_argument(std::string(what) + " must be a positive integer");
  return j.get<Index>();
}

}  // namespace

Json state_to_json(const DensityMatrix& rho)
{
  return Json{{"dims", rho.dims()}, {"matrix", matrix_to_json(rho.matrix())}};
}

DensityMatrix state_from_json(const Json& j)
{
  const DimVector dims = dims_from_json(field(j, "dims", "state"), "state");
  const Index n = dim_product(dims);
  return new_density(matrix_from_json(field(j, "matrix", "state"), n, n), dims);
}

Json channel_to_json(const Channel& chan)
{
  return Json{{"dim_in", chan.dim_in()},
              {"dim_out", chan.dim_out()},
              {"out_dims", chan.out_dims()},
              {"choi", matrix_to_json(chan.choi())}};
}

Channel channel_from_json(const Json& j)
{
  const Index din = positive_index(field(j, "dim_in", "channel"), "channel: dim_in");
  const Index dout = positive_index(field(j, "dim_out", "channel"), "channel: dim_out");
  DimVector out_dims{dout};
  if (j.contains("out_dims")) {
    out_dims = dims_from_json(j.at("out_dims"), "channel");
    if (dim_product(out_dims) != dout)
      throw std::invalid_argument("channel: out_dims do not multiply to dim_out");
  }
  const Index n = din * dout;
  return Channel(matrix_from_json(field(j, "choi", "channel"), n, n), din, out_dims);
}

Json report_to_json(const RecoveryReport& r)
{
  Json j{{"cmi_bits", real_to_json(r.cmi_bits)},
         {"fid", real_to_json(r.fid)},
         {"neg2logF", real_to_json(r.neg2logF)},
         {"delta_thm1", real_to_json(r.delta_thm1)},
         {"delta_cor3", real_to_json(r.delta_cor3)}};
  j["dm_bits"] = r.dm_bits ? real_to_json(*r.dm_bits) : Json(nullptr);
  j["delta_meas"] = r.delta_meas ? real_to_json(*r.delta_meas) : Json(nullptr);
  return j;
}

RecoveryReport report_from_json(const Json& j)
{
  RecoveryReport r;
  r.cmi_bits = real_from_json(field(j, "cmi_bits", "report"));
  r.fid = real_from_json(field(j, "fid", "report"));
  r.neg2logF = real_from_json(field(j, "neg2logF", "report"));
  r.delta_thm1 = real_from_json(field(j, "delta_thm1", "report"));
  r.delta_cor3 = real_from_json(field(j, "delta_cor3", "report"));
  if (j.contains("dm_bits") && !j.at("dm_bits").is_null())
    r.dm_bits = real_from_json(j.at("dm_bits"));
  if (j.contains("delta_meas") && !j.at("delta_meas").is_null())
    r.delta_meas = real_from_json(j.at("delta_meas"));
  return r;
}

namespace {

Json entries_to_json(const std::vector<SdpEntry>& entries)
{
  Json out = Json::array();
  for (const auto& e : entries)
    out.push_back(Json::array({e.block, e.row, e.col, e.value}));
  return out;
}

std::vector<SdpEntry> entries_from_json(const Json& j)
{
  if (!j.is_array())
    throw std::invalid_argument("sdp: entry list must be an array");
  std::vector<SdpEntry> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 4)
      throw std::invalid_argument("sdp: entries are [block, row, col, value]");
    out.push_back({e[0].get<std::size_t>(), e[1].get<Index>(), e[2].get<Index>(),
                   e[3].get<double>()});
  }
  return out;
}

}  // namespace

Json sdp_to_json(const SdpProblem& p)
{
  Json cons = Json::array();
  for (const auto& c : p.constraints)
    cons.push_back(Json{{"entries", entries_to_json(c.entries)}, {"rhs", c.rhs}});
  return Json{{"blocks", p.blocks}, {"objective", entries_to_json(p.objective)},
              {"constraints", cons}};
}

Json sdp_to_json(const SdpProblem& p, const SdpSolution& s)
{
  Json j = sdp_to_json(p);
  Json hist = Json::array();
  for (const auto& it : s.history)
    hist.push_back(Json{{"iteration", it.iteration},
                        {"primal_objective", it.primal_objective},
                        {"dual_objective", it.dual_objective},
                        {"primal_infeasibility", it.primal_infeasibility},
                        {"dual_infeasibility", it.dual_infeasibility},
                        {"complementarity", it.complementarity},
                        {"step_primal", it.step_primal},
                        {"step_dual", it.step_dual}});
  j["solution"] = Json{{"status", to_string(s.status)},
                       {"primal_objective", real_to_json(s.primal_objective)},
                       {"dual_objective", real_to_json(s.dual_objective)},
                       {"gap", real_to_json(s.gap)},
                       {"primal_residual", real_to_json(s.primal_residual)},
                       {"dual_residual", real_to_json(s.dual_residual)},
                       {"iterations", s.iterations},
                       {"dropped_constraints", s.dropped_constraints},
                       {"dual", std::vector<double>(s.dual.data(), s.dual.data() + s.dual.size())},
                       {"history", hist}};
  return j;
}

SdpProblem sdp_problem_from_json(const Json& j)
{
  SdpProblem p;
  p.blocks = field(j, "blocks", "sdp").get<std::vector<Index>>();
  p.objective = entries_from_json(field(j, "objective", "sdp"));
  for (const auto& c : field(j, "constraints", "sdp"))
    p.constraints.push_back({entries_from_json(field(c, "entries", "sdp constraint")),
                             field(c, "rhs", "sdp constraint").get<double>()});
  p.validate();
  return p;
}

Json read_json_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out)
    throw std::runtime_error("write failed for " + path.string());
}

DensityMatrix load_state(const std::filesystem::path& path)
{
  try {
    return state_from_json(read_json_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void save_state(const std::filesystem::path& path, const DensityMatrix& rho)
{
  write_text_file(path, state_to_json(rho).dump(2) + "\n");
}

}  // namespace recov
