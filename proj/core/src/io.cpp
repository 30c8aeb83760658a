#include "cebound/io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "cebound/errors.hpp"

namespace cebound {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

Index positive_int(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw ValidationError(std::string("state file: \"") + key + "\" must be an integer");
  }
  const auto v = j.at(key).get<long long>();
  if (v < 1) throw ValidationError(std::string("state file: \"") + key + "\" must be >= 1");
  return static_cast<Index>(v);
}

} // namespace

BlockState state_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("state file: top level must be an object");
  const Index dp = positive_int(j, "dim_p");
  const Index dq = positive_int(j, "dim_q");
  const Index d = dp + dq;
  if (!j.contains("matrix") || !j.at("matrix").is_array()) {
    throw ValidationError("state file: \"matrix\" must be an array of rows");
  }
  const json& rows = j.at("matrix");
  if (static_cast<Index>(rows.size()) != d) {
    throw ValidationError("state file: matrix must have dim_p + dim_q = " + std::to_string(d) + " rows");
  }
  ComplexMatrix m(d, d);
  for (Index r = 0; r < d; ++r) {
    const json& row = rows.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Index>(row.size()) != d) {
      throw ValidationError("state file: row " + std::to_string(r) + " must have " + std::to_string(d) + " entries");
    }
    for (Index c = 0; c < d; ++c) {
      const json& e = row.at(static_cast<std::size_t>(c));
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ValidationError("state file: entry (" + std::to_string(r) + ", " + std::to_string(c) +
                              ") must be [re, im]");
      }
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return block_decompose(DensityMatrix(m), dp);
}

BlockState parse_state(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("state file: invalid JSON: ") + e.what());
  }
  return state_from_json(j);
}

BlockState load_state_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("state file: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_state(buf.str());
}

json state_to_json(const BlockState& state) {
  const ComplexMatrix m = state.assemble();
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    // Adding 0.0 writes signed zeros as 0.0.
    for (Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real() + 0.0, m(r, c).imag() + 0.0}));
    rows.push_back(std::move(row));
  }
  return json{{"dim_p", state.dim_p()}, {"dim_q", state.dim_q()}, {"matrix", std::move(rows)}};
}

json to_json(const BoundReport& r) {
  json margins = json::object();
  for (const auto& [name, value] : r.margins) margins[name] = value;
  const PinskerDiagnostic& d = r.pinsker_diagnostic;
  return json{
      {"entropy", r.entropy},
      {"bkm_bound", r.bkm_bound},
      {"log_bound", optional_number(r.log_bound)},
      {"pinsker_bound", r.pinsker_bound},
      {"fidelity_bound", r.fidelity_bound},
      {"coarse_applicable", r.coarse_applicable},
      {"regularized", r.regularized},
      {"margins", std::move(margins)},
      {"params",
       {{"a0", r.params.a0},
        {"eps_q", r.params.eps_q},
        {"frob_sq", r.params.frob_sq},
        {"trace_norm_b", r.params.trace_norm_b},
        {"rank_b", r.params.rank_b}}},
      {"pinsker_diagnostic",
       {{"log_ratio", optional_number(d.log_ratio)},
        {"pinsker_ratio", optional_number(d.pinsker_ratio)},
        {"exponential_regime", d.exponential_regime},
        {"log_dominates", d.log_dominates}}},
  };
}

json to_json(const OptimizerResult& r) {
  return json{{"a_star", r.a_star},
              {"value", r.value},
              {"entropy", r.entropy},
              {"regularized", false},
              {"state", state_to_json(r.state)}};
}

json to_json(const VariationalCheck& c) {
  return json{{"trials", c.trials},
              {"min_found", c.min_found},
              {"min_sampled", c.trials > 0 ? json(c.min_sampled) : json(nullptr)},
              {"bound", c.bound},
              {"gap", c.gap},
              {"optimizer_gap", c.optimizer_gap}};
}

json to_json(const SeparationPoint& p) {
  return json{{"K", p.k},   {"eps", p.eps},     {"eta", p.eta},     {"m", p.m},
              {"a1", p.a1}, {"ratio", p.ratio}, {"regularized", false}, {"state", state_to_json(p.state)}};
}

} // namespace cebound
