#include <cstring>
#include "bcslab/serialize.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bcslab::serialize {

using nlohmann::json;

json potential_json(const foundation::Potential& v) {
  return json{{"kind", v.kind() == foundation::Potential::Kind::GaussianWell
                           ? "gaussian-well"
                           : "user-table"},
              {"depth", v.depth()},
              {"width", v.width()}};
}

json radial_grid_json(const foundation::RadialGrid& g) {
  return json{{"pmax", g.pmax()}, {"count", g.count()}};
}

json box_grid_json(const foundation::BoxGrid& b) {
  return json{{"L", b.L()}, {"n", b.n()}, {"dims", b.dims()}, {"h", b.h()}};
}

json gap_solution_json(const tibcs::GapSolution& sol, const foundation::RadialGrid& grid,
                       double tol) {
  json out{{"schema", kSchemaVersion},
           {"T", sol.T},
           {"Tc", sol.Tc},
           {"residual", sol.residual},
           {"tolerance", tol},
           {"iterations", sol.iterations},
           {"converged", sol.converged}};
  out["nodes"] = grid.nodes();
  out["delta"] = sol.delta;
  return out;
}

std::string gap_solution_csv(const tibcs::GapSolution& sol, const tibcs::TiState& state,
                             const foundation::RadialGrid& grid) {
  std::ostringstream os;
  os.precision(17);
  os << "p,delta,gamma,alpha\n";
  for (int i = 0; i < grid.count(); ++i)
    os << grid.node(i) << ',' << sol.delta[i] << ',' << state.gamma[i] << ','
       << state.alpha[i] << '\n';
  return os.str();
}

json suite_report_json(const entropy::SuiteReport& rep, double floor) {
  return json{{"schema", kSchemaVersion},
              {"inequality_id", rep.inequality_id},
              {"samples", rep.samples},
              {"min_slack", rep.min_slack},
              {"floor", floor},
              {"argmin_seed", rep.argmin_seed}};
}

json kernel_eval_json(const kernels::KernelEval& eval) {
  return json{{"schema", kSchemaVersion},
              {"method", eval.method},
              {"value", eval.value},
              {"tail", eval.tail_bound},
              {"inputs", json{{"Ep", eval.p}, {"Eq", eval.q}}}};
}

json series_eval_json(const kernels::SeriesEval& eval, const std::string& method,
                      const json& inputs) {
  return json{{"schema", kSchemaVersion},
              {"method", method},
              {"value", eval.approx},
              {"tail", eval.tail},
              {"inputs", inputs}};
}

json norm_scaling_json(const kernels::NormScalingResult& res) {
  json rows = json::array();
  for (std::size_t i = 0; i < res.h_values.size(); ++i)
    rows.push_back(json{{"h", res.h_values[i]},
                        {"norm11", res.norm11[i]},
                        {"norm12", res.norm12[i]}});
  return json{{"schema", kSchemaVersion}, {"rows", rows},
              {"e11", res.e11},           {"r2_11", res.r2_11},
              {"e12", res.e12},           {"r2_12", res.r2_12}};
}

json bdg_scaling_json(const bdg::BdgScalingResult& res) {
  json rows = json::array();
  for (const auto& r : res.rows)
    rows.push_back(json{
        {"h", r.h}, {"l2", r.l2}, {"h1", r.h1}, {"weighted_h2", r.weighted_h2}});
  return json{{"schema", kSchemaVersion},
              {"rows", rows},
              {"exponent", res.fit_h1.exponent},
              {"r2", res.fit_h1.r2},
              {"exponent_l2", res.fit_l2.exponent},
              {"exponent_weighted", res.fit_weighted.exponent}};
}

json certificate_json(const cert::Certificate& c) {
  return json{{"schema", kSchemaVersion},
              {"f_value", c.f_value},
              {"grad_psi_sq", c.grad_psi_sq},
              {"phi_l2_sq", c.phi_l2_sq},
              {"xi_h1_sq", c.xi_h1_sq},
              {"q_h1_sq", c.q_h1_sq},
              {"h", c.h},
              {"c1", c.c1},
              {"c2", c.c2},
              {"rhs", c.rhs()},
              {"applicable", c.applicable()},
              {"lower_bound_holds", c.lower_bound_holds()}};
}

json apriori_json(const cert::AprioriResult& res) {
  json rows = json::array();
  for (const auto& r : res.rows) {
    json row = certificate_json(r.certificate);
    row["T"] = r.T;
    row["eps"] = r.eps;
    rows.push_back(row);
  }
  return json{{"schema", kSchemaVersion},
              {"Tc", res.Tc},
              {"rows", rows},
              {"xi_exponent", res.xi_fit.exponent},
              {"xi_r2", res.xi_fit.r2},
              {"q_exponent", res.q_fit.exponent},
              {"q_r2", res.q_fit.r2}};
}

json ktv_json(const cert::KtvFormBound& kb) {
  return json{{"schema", kSchemaVersion},
              {"cstar", kb.cstar},
              {"min_sampled_ratio", kb.min_sampled_ratio},
              {"gap_residual", kb.gap_residual},
              {"refined_nontrivial", kb.refined_nontrivial},
              {"kernel_lhs", kb.kernel_lhs},
              {"kernel_rhs", kb.kernel_rhs}};
}

json split_bounds_json(const decomp::SplitBounds& sb) {
  return json{{"schema", kSchemaVersion},
              {"s", sb.s},
              {"l1_low", sb.l1_low},
              {"l1_low_bound", sb.l1_low_bound},
              {"zero_mode", sb.zero_mode},
              {"const_l1_discrete", sb.const_l1_discrete},
              {"const_l1_continuum", sb.const_l1_continuum},
              {"l2_high", sb.l2_high},
              {"l2_high_bound", sb.l2_high_bound},
              {"l4_high", sb.l4_high},
              {"l4_interp_bound", sb.l4_interp_bound},
              {"l6_high", sb.l6_high},
              {"grad_eta", sb.grad_eta},
              {"grad_psi", sb.grad_psi}};
}

namespace {

constexpr char kPairMagic[8] = {'B', 'C', 'S', 'P', 'F', '0', '1', '\0'};
constexpr char kStateMagic[8] = {'B', 'C', 'S', 'B', 'S', '0', '1', '\0'};

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw InvalidArgument("binary file truncated");
  return v;
}

}  // namespace

void write_pair_field(const std::string& path, const decomp::PairField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("write_pair_field: cannot open " + path);
  os.write(kPairMagic, 8);
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(field.box.dims()));
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(field.box.n()));
  write_raw<double>(os, field.box.L());
  write_raw<double>(os, field.box.h());
  const int M = field.box.size();
  for (int x = 0; x < M; ++x)
    for (int y = 0; y < M; ++y) {
      write_raw<float>(os, static_cast<float>(field.values(x, y).real()));
      write_raw<float>(os, static_cast<float>(field.values(x, y).imag()));
    }
}

decomp::PairField read_pair_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("read_pair_field: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kPairMagic, 8) != 0)
    throw InvalidArgument("read_pair_field: bad magic");
  const auto dims = read_raw<std::uint32_t>(is);
  const auto n = read_raw<std::uint32_t>(is);
  const double L = read_raw<double>(is);
  const double h = read_raw<double>(is);
  foundation::BoxGrid box(L, static_cast<int>(n), static_cast<int>(dims), h);
  Eigen::MatrixXcd values(box.size(), box.size());
  for (int x = 0; x < box.size(); ++x)
    for (int y = 0; y < box.size(); ++y) {
      const float re = read_raw<float>(is);
      const float im = read_raw<float>(is);
      values(x, y) = std::complex<double>(re, im);
    }
  return decomp::PairField(box, std::move(values), false);
}

void write_block_state(const std::string& path, const entropy::BlockState& state) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("write_block_state: cannot open " + path);
  os.write(kStateMagic, 8);
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(state.half_dim()));
  const auto& m = state.matrix();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      write_raw<double>(os, m(i, j).real());
      write_raw<double>(os, m(i, j).imag());
    }
}

entropy::BlockState read_block_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("read_block_state: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kStateMagic, 8) != 0)
    throw InvalidArgument("read_block_state: bad magic");
  const auto m = read_raw<std::uint32_t>(is);
  Eigen::MatrixXcd full(2 * m, 2 * m);
  for (int i = 0; i < full.rows(); ++i)
    for (int j = 0; j < full.cols(); ++j) {
      const double re = read_raw<double>(is);
      const double im = read_raw<double>(is);
      full(i, j) = std::complex<double>(re, im);
    }
  return entropy::BlockState::from_matrix(full, 1e-8);
}

}  // namespace bcslab::serialize
