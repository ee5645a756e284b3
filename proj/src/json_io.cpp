#include "hostforge/json_io.hpp"

#include <istream>
#include <ostream>

namespace hostforge {

Json to_json(const ExpLaw& law) { return Json{{"a", law.a}, {"b", law.b}}; }

Json to_json(const RatioChain& chain) {
  Json laws = Json::array();
  for (const auto& l : chain.laws) laws.push_back(to_json(l));
  return Json{{"levels", chain.levels}, {"laws", laws}};
}

Json to_json(const DistLaw& dist) {
  return Json{{"family", std::string(to_string(dist.family))},
              {"mean", to_json(dist.mean_law)},
              {"variance", to_json(dist.variance_law)}};
}

Json to_json(const SquareMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

Json to_json(const CorrelationModel& corr) {
  return Json{{"order", {"per_core_memory", "whetstone", "dhrystone"}},
              {"R", to_json(corr.r())},
              {"L", to_json(corr.l())}};
}

Json to_json(const WeibullLaw& law) { return Json{{"k", law.k}, {"lambda_days", law.lambda}}; }

Json to_json(const ModelParams& p) {
  return Json{{"core_chain", to_json(p.core_chain)}, {"mem_chain", to_json(p.mem_chain)},
              {"dhrystone", to_json(p.dhrystone)},   {"whetstone", to_json(p.whetstone)},
              {"disk", to_json(p.disk)},             {"correlation", to_json(p.correlation)},
              {"lifetime", to_json(p.lifetime)}};
}

Json to_json(const FitReport& fit) {
  return Json{{"a", fit.law.a},
              {"b", fit.law.b},
              {"r", fit.r},
              {"n_points", fit.n_points},
              {"residual_rms", fit.residual_rms},
              {"degenerate", fit.degenerate}};
}

Json to_json(const DistFamily& fit) {
  Json j{{"family", std::string(to_string(fit.tag))}};
  Json params = Json::object();
  if (fit.degenerate) {
    params["point"] = fit.point;
  } else {
    const auto names = fit.param_names();
    for (std::size_t i = 0; i < fit.param_count(); ++i) params[names[i]] = fit.params[i];
  }
  j["params"] = params;
  j["degenerate"] = fit.degenerate;
  return j;
}

Json to_json(const BestFit& fit) {
  Json ranked = Json::array();
  for (const auto& r : fit.ranked) {
    Json e = to_json(r.fit);
    e["mean_p"] = r.mean_p;
    ranked.push_back(e);
  }
  return Json{{"ranked", ranked}, {"notes", fit.notes}};
}

namespace {

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end() || it->is_null())
    throw std::invalid_argument(where + "." + key + " is missing or null");
  return *it;
}

double number(const Json& j, const char* key, const std::string& where) {
  const Json& v = need(j, key, where);
  if (!v.is_number()) throw std::invalid_argument(where + "." + key + " must be a number");
  return v.get<double>();
}

ExpLaw law_from(const Json& j, const std::string& where) {
  return ExpLaw(number(j, "a", where), number(j, "b", where));
}

RatioChain chain_from(const Json& j, const std::string& where) {
  const auto levels = need(j, "levels", where).get<std::vector<int>>();
  const Json& laws = need(j, "laws", where);
  if (!laws.is_array()) throw std::invalid_argument(where + ".laws must be an array");
  std::vector<ExpLaw> out;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const std::string w = where + ".laws[" + std::to_string(i) + "]";
    if (laws[i].is_null()) throw std::invalid_argument(w + " is null");
    out.push_back(law_from(laws[i], w));
  }
  return RatioChain(levels, out);
}

DistLaw dist_from(const Json& j, const std::string& where) {
  return DistLaw(family_from_string(need(j, "family", where).get<std::string>()),
                 law_from(need(j, "mean", where), where + ".mean"),
                 law_from(need(j, "variance", where), where + ".variance"));
}

SquareMatrix matrix_from(const Json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument(where + " must be an array of rows");
  SquareMatrix m(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != j.size())
      throw std::invalid_argument(where + " must be square");
    for (std::size_t k = 0; k < j.size(); ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

ModelParams params_from_json(const Json& j) {
  try {
    ModelParams p;
    p.core_chain = chain_from(need(j, "core_chain", "params"), "core_chain");
    p.mem_chain = chain_from(need(j, "mem_chain", "params"), "mem_chain");
    p.dhrystone = dist_from(need(j, "dhrystone", "params"), "dhrystone");
    p.whetstone = dist_from(need(j, "whetstone", "params"), "whetstone");
    p.disk = dist_from(need(j, "disk", "params"), "disk");
    p.correlation =
        CorrelationModel(matrix_from(need(need(j, "correlation", "params"), "R", "correlation"),
                                     "correlation.R"));
    const Json& life = need(j, "lifetime", "params");
    p.lifetime = WeibullLaw(number(life, "k", "lifetime"), number(life, "lambda_days", "lifetime"));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("params: ") + e.what());
  }
}

ModelParams read_params(std::istream& in) {
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("params: ") + e.what());
  }
  return params_from_json(j);
}

void write_params(std::ostream& out, const ModelParams& params) {
  out << to_json(params).dump(2) << '\n';
}

}  // namespace hostforge
