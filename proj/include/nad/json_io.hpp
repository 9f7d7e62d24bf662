// JSON (de)serialization for maps, tau descriptors and driver results.
// Components are 1-based on the wire; rationals travel as "num/den" strings.
#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nad/dyngroup.hpp"
#include "nad/pdj.hpp"
#include "nad/pdulac.hpp"
#include "nad/scalar.hpp"
#include "nad/series.hpp"

namespace nad {

using Json = nlohmann::json;

inline Json rat_json(const Rat& x) { return rat_to_string(x); }

inline Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return parse_rat(j.get<std::string>());
  throw std::invalid_argument("rational must be a \"num/den\" string");
}

inline Json map_to_json(const FormalMap& F) {
  Json j;
  j["vars"] = F.vars();
  j["truncation"] = F.truncation();
  Json eig = Json::array();
  for (unsigned k = 0; k < F.vars(); ++k) eig.push_back(rat_json(F.eigenvalues()[k]));
  j["eigenvalues"] = eig;
  Json terms = Json::array();
  for (unsigned k = 0; k < F.vars(); ++k) {
    for (const auto& [a, v] : F.tail(k).terms()) {
      Json t;
      t["component"] = k + 1;
      t["index"] = {a[0], a[1]};
      t["value"] = rat_json(v);
      terms.push_back(t);
    }
  }
  j["terms"] = terms;
  return j;
}

inline FormalMap map_from_json(const Json& j) {
  unsigned vars = j.at("vars").get<unsigned>();
  if (vars != 2) throw std::invalid_argument("map: only two-variable maps supported");
  unsigned trunc = j.at("truncation").get<unsigned>();
  const Json& eig = j.at("eigenvalues");
  if (eig.size() != vars) throw std::invalid_argument("map: eigenvalue arity mismatch");
  std::vector<Rat> lambda{rat_from_json(eig[0]), rat_from_json(eig[1])};
  FormalMap F(vars, trunc, lambda);
  for (const auto& t : j.value("terms", Json::array())) {
    unsigned comp = t.at("component").get<unsigned>();
    if (comp < 1 || comp > vars) throw std::invalid_argument("map: component out of range");
    const Json& ix = t.at("index");
    Idx a{ix.at(0).get<unsigned>(), ix.at(1).get<unsigned>()};
    F.set_tail_coeff(comp - 1, a, rat_from_json(t.at("value")));
  }
  return F;
}

inline Json tau_to_json(const TauSpec& s) {
  Json j;
  switch (s.variant) {
    case TauSpec::Variant::factorial:
      j["variant"] = "factorial";
      break;
    case TauSpec::Variant::maxes:
      j["variant"] = "maxes";
      j["lambda"] = rat_json(s.lambda);
      break;
    case TauSpec::Variant::mixed:
      j["variant"] = "mixed";
      j["lambda"] = rat_json(s.lambda);
      j["n"] = s.n;
      break;
    case TauSpec::Variant::sigma:
      j["variant"] = "sigma";
      j["q"] = rat_json(s.q);
      j["m"] = s.m;
      break;
    case TauSpec::Variant::table: {
      j["variant"] = "table";
      j["lambda"] = rat_json(s.lambda);
      Json tab = Json::object();
      for (const auto& [deg, e] : s.table_exponents) tab[std::to_string(deg)] = e;
      j["exponents"] = tab;
      break;
    }
  }
  j["t"] = s.t;
  return j;
}

inline TauSpec tau_from_json(const Json& j) {
  std::string v = j.at("variant").get<std::string>();
  if (v == "factorial") {
    TauSpec s = TauSpec::factorial_spec();
    s.t = j.value("t", 1u);
    return s;
  }
  if (v == "maxes") {
    TauSpec s = TauSpec::maxes_spec(rat_from_json(j.at("lambda")));
    s.t = j.value("t", 2u);
    return s;
  }
  if (v == "mixed") {
    TauSpec s = TauSpec::mixed_spec(rat_from_json(j.at("lambda")), j.at("n").get<unsigned>());
    s.t = j.value("t", 2u);
    return s;
  }
  if (v == "sigma") {
    TauSpec s = TauSpec::sigma_spec(rat_from_json(j.at("q")), j.at("m").get<unsigned>());
    s.t = j.value("t", 2u);
    return s;
  }
  if (v == "table") {
    std::map<unsigned long long, long long> tab;
    for (const auto& [key, val] : j.at("exponents").items())
      tab[std::stoull(key)] = val.get<long long>();
    return TauSpec::table_spec(rat_from_json(j.at("lambda")), std::move(tab),
                               j.value("t", 1u));
  }
  throw std::invalid_argument("tau: unknown variant \"" + v + "\"");
}

inline Json resonances_to_json(const std::vector<Resonance>& res) {
  Json arr = Json::array();
  for (const auto& r : res) {
    Json e;
    e["component"] = r.component + 1;
    e["index"] = {r.index[0], r.index[1]};
    arr.push_back(e);
  }
  return arr;
}

inline Json certificates_to_json(const std::vector<Certificate>& certs) {
  Json arr = Json::array();
  for (const auto& c : certs) {
    Json e;
    e["target"] = c.target == CertTarget::conjugator ? "conjugator" : "normal_form";
    e["component"] = c.component + 1;
    e["index"] = {c.index[0], c.index[1]};
    e["margin"] = c.margin;
    arr.push_back(e);
  }
  return arr;
}

inline Json pd_result_to_json(const PDResult& r) {
  Json j;
  j["normal_form"] = map_to_json(r.normal_form);
  j["conjugator"] = map_to_json(r.conjugator);
  j["conjugator_inverse"] = map_to_json(r.conjugator_inverse);
  j["resonances"] = resonances_to_json(r.resonances);
  j["certificates"] = certificates_to_json(r.certificates);
  j["used_inverse"] = r.used_inverse;
  j["internal_scale"] = rat_json(r.internal_scale);
  return j;
}

inline Json pdj_form_to_json(const PDJForm& f) {
  Json j;
  j["lambda"] = rat_json(f.lambda);
  j["m"] = f.oned.m;
  j["rho"] = rat_json(f.oned.rho);
  j["mu"] = rat_json(f.oned.mu);
  Json r = Json::array();
  for (const auto& v : f.r) r.push_back(rat_json(v));
  j["r"] = r;
  return j;
}

inline Json pdj_reduction_to_json(const PDJReduction& r) {
  Json j;
  j["form"] = pdj_form_to_json(r.form);
  j["conjugator"] = map_to_json(r.conjugator);
  Json c = Json::array(), cm = Json::array(), am = Json::array();
  for (const auto& v : r.ladder.c) c.push_back(rat_json(v));
  for (auto m : r.ladder.c_margins) cm.push_back(m);
  for (auto m : r.ladder.alpha_margins) am.push_back(m);
  j["ladder_c"] = c;
  j["ladder_c_margins"] = cm;
  j["ladder_alpha_margins"] = am;
  j["internal_scale"] = rat_json(r.scale);
  return j;
}

}  // namespace nad
