// Batch job runner: parses a JSON job file, routes to the library drivers and
// prints a certificate report (text or JSON).
//
// Exit codes: 0 success, 2 precondition or input error, 3 internal
// certificate violation (a bug if the preconditions held).
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nad/json_io.hpp"
#include "nad/oned.hpp"

namespace {

using namespace nad;

struct JobOverrides {
  std::optional<unsigned> degree;
  std::optional<std::string> mode;
  std::optional<Json> tau;
};

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

// Routed mode for a two-variable map: "repelling" (with n), "semihyperbolic",
// "generic", or "saddle".
struct Route {
  std::string mode;
  unsigned n = 0;
};

Route route_eigenvalues(const FormalMap& F, unsigned maxn, const PrimeContext& ctx) {
  Rat l1 = F.eigenvalues()[0];
  Rat l2 = F.eigenvalues()[1];
  long long v1 = valuation(l1, ctx);
  long long v2 = valuation(l2, ctx);
  if (l1 == 1 && v2 != 0) return {"semihyperbolic", 0};
  if (v1 != 0) {
    Rat p = l1;
    for (unsigned n = 2; n <= std::max(2u, maxn); ++n) {
      p *= l1;
      if (p == l2) return {"repelling", n};
    }
  }
  if ((v1 < 0 && v2 > 0) || (v1 > 0 && v2 < 0)) {
    if (!find_resonances(l1, l2, F.truncation()).empty()) return {"saddle", 0};
  }
  return {"generic", 0};
}

Json certificate_summary(const PDResult& pd, const PrimeContext& ctx) {
  Json j;
  long long worst = 0;
  bool all_ok = true;
  for (const auto& c : pd.certificates) {
    worst = std::min(worst, c.margin);
    if (c.margin < 0) all_ok = false;
  }
  j["worst_margin"] = worst;
  j["all_nonnegative"] = all_ok;
  if (all_ok) {
    GrowthCertificate g = growth_certificate(pd.conjugator, ctx);
    j["convergence_radius"] = ctx.p.str() + "^-" + std::to_string(g.exponent);
  }
  return j;
}

// Runs one normalize-style job and embeds enough data for later independent
// re-verification (the verify command).
Json run_normalize(const FormalMap& F, const std::string& mode_req, unsigned N, unsigned n_opt,
                   const PrimeContext& ctx, std::string& warning) {
  Route route{mode_req, n_opt};
  if (mode_req == "auto") route = route_eigenvalues(F, N, ctx);
  if (route.mode == "saddle")
    throw std::invalid_argument("saddle resonance: out of scope (open problem)");

  Json rep;
  rep["command"] = "normalize";
  rep["mode"] = route.mode;
  rep["prime"] = ctx.p.str();
  rep["degree"] = N;
  rep["input"] = map_to_json(retruncate(F, N));

  Rat q = find_integralizing_q(F, ctx);
  FormalMap Fq = conjugate_by_scaling(F, q);
  rep["internal_rescale"] = rat_to_string(q);

  std::optional<PDResult> pd_opt;
  if (route.mode == "repelling") {
    if (route.n < 2) throw std::invalid_argument("repelling mode needs resonance power n >= 2");
    pd_opt = repelling_normalize(Fq, route.n, N, ctx);
    rep["n"] = route.n;
  } else if (route.mode == "semihyperbolic") {
    pd_opt = semihyperbolic_normalize(Fq, N, ctx);
  } else if (route.mode == "generic") {
    pd_opt = pd_normalize(Fq, N);
    warning = "generic mode: no analyticity certificate is claimed";
  } else {
    throw std::invalid_argument("unknown mode \"" + route.mode + "\"");
  }
  PDResult& pd = *pd_opt;

  // transport back to the original coordinates
  FormalMap F0 = conjugate_by_scaling(pd.normal_form, 1 / q);
  FormalMap Phi = conjugate_by_scaling(pd.conjugator, 1 / q);
  FormalMap PhiInv = conjugate_by_scaling(pd.conjugator_inverse, 1 / q);
  if (!verify_conjugacy(retruncate(F, N), F0, Phi).empty())
    throw std::logic_error("residual nonempty after rescale transport");

  rep["normal_form"] = map_to_json(F0);
  rep["conjugator"] = map_to_json(Phi);
  rep["conjugator_inverse"] = map_to_json(PhiInv);
  rep["resonances"] = resonances_to_json(pd.resonances);
  rep["certificates"] = certificates_to_json(pd.certificates);
  rep["certificate_summary"] = certificate_summary(pd, ctx);
  rep["used_inverse"] = pd.used_inverse;
  rep["internal_scale"] = rat_to_string(pd.internal_scale * q);
  rep["residual"] = "verified";
  return rep;
}

Json run_job(const Json& job, const JobOverrides& ov) {
  Int prime(job.at("prime").is_string() ? Int(job.at("prime").get<std::string>())
                                        : Int(job.at("prime").get<long long>()));
  PrimeContext ctx{prime};
  std::string command = job.at("command").get<std::string>();
  unsigned N = ov.degree ? *ov.degree : job.value("degree", 0u);
  std::string mode = ov.mode ? *ov.mode : job.value("mode", std::string("auto"));
  std::string warning;

  Json rep;
  if (command == "resonances") {
    Rat l1, l2;
    unsigned maxdeg = N;
    if (job.contains("eigenvalues")) {
      l1 = rat_from_json(job.at("eigenvalues").at(0));
      l2 = rat_from_json(job.at("eigenvalues").at(1));
    } else {
      FormalMap F = map_from_json(job.at("map"));
      l1 = F.eigenvalues()[0];
      l2 = F.eigenvalues()[1];
      if (maxdeg == 0) maxdeg = F.truncation();
    }
    if (maxdeg < 2) throw std::invalid_argument("resonances: degree >= 2 required");
    rep["command"] = "resonances";
    rep["eigenvalues"] = {rat_to_string(l1), rat_to_string(l2)};
    rep["degree"] = maxdeg;
    rep["resonances"] = resonances_to_json(find_resonances(l1, l2, maxdeg));
  } else if (command == "normalize") {
    FormalMap F = map_from_json(job.at("map"));
    if (N == 0) N = F.truncation();
    if (N < 2) throw std::invalid_argument("normalize: degree >= 2 required");
    rep = run_normalize(F, mode, N, job.value("n", 0u), ctx, warning);
  } else if (command == "pdj") {
    FormalMap F = map_from_json(job.at("map"));
    if (N == 0) N = F.truncation();
    Rat q = find_integralizing_q(F, ctx);
    PDResult pd = semihyperbolic_normalize(conjugate_by_scaling(F, q), N, ctx);
    PDJReduction red = pdj_reduce(pd.normal_form, N, ctx);
    rep["command"] = "pdj";
    rep["prime"] = ctx.p.str();
    rep["degree"] = N;
    rep["internal_rescale"] = rat_to_string(q);
    rep["pd"] = pd_result_to_json(pd);
    rep["pdj"] = pdj_reduction_to_json(red);
    rep["residual"] = "verified";
  } else if (command == "equiv") {
    FormalMap F = map_from_json(job.at("map"));
    FormalMap G = map_from_json(job.at("map2"));
    if (N == 0) N = std::min(F.truncation(), G.truncation());
    Route route{mode, job.value("n", 0u)};
    if (mode == "auto") route = route_eigenvalues(F, N, ctx);
    EquivResult verdict{false, "", std::nullopt};
    if (route.mode == "repelling")
      verdict = decide_equiv_repelling(F, G, route.n, N, ctx);
    else if (route.mode == "semihyperbolic")
      verdict = decide_equiv_semihyperbolic(F, G, N, ctx);
    else if (route.mode == "saddle")
      throw std::invalid_argument("saddle resonance: out of scope (open problem)");
    else
      throw std::invalid_argument("equiv: no decision procedure for mode \"" + route.mode + "\"");
    rep["command"] = "equiv";
    rep["mode"] = route.mode;
    rep["equivalent"] = verdict.equivalent;
    rep["reason"] = verdict.reason;
    if (verdict.zeta) {
      rep["zeta_witness"] = {{"t_residue", verdict.zeta->t_residue},
                             {"t_modulus", verdict.zeta->t_modulus},
                             {"group_order", verdict.zeta->group_order}};
    }
  } else if (command == "dyncheck") {
    Json tau_json = ov.tau ? *ov.tau : job.at("tau");
    TauSpec spec = tau_from_json(tau_json);
    rep["command"] = "dyncheck";
    rep["tau"] = tau_to_json(spec);
    if (job.contains("map")) {
      FormalMap F = map_from_json(job.at("map"));
      MembershipResult m = membership(F, spec, ctx);
      rep["check"] = "membership";
      rep["pass"] = m.pass;
      rep["worst_margin"] = m.worst_margin;
      if (m.offending) {
        rep["offending"] = {{"component", m.offending->component + 1},
                            {"index", {m.offending->index[0], m.offending->index[1]}},
                            {"margin", m.offending->margin}};
      }
    } else {
      unsigned bound = N ? N : 5;
      DynMode dm = job.value("inequality", std::string("weak")) == "strong" ? DynMode::strong
                                                                            : DynMode::weak;
      auto w = check_dynamic(spec, bound, dm, ctx);
      rep["check"] = "dynamic";
      rep["bound"] = bound;
      rep["inequality"] = dm == DynMode::strong ? "strong" : "weak";
      rep["pass"] = !w.has_value();
      if (w) {
        Json wj;
        wj["a"] = w->a;
        wj["a0"] = w->a0;
        wj["parts"] = w->parts;
        wj["b"] = w->bs;
        wj["c"] = w->c;
        wj["component"] = w->component + 1;
        wj["lhs_valuation"] = w->lhs_val;
        wj["rhs_valuation"] = w->rhs_val;
        rep["witness"] = wj;
      }
    }
  } else if (command == "verify") {
    // Re-verify a previously emitted normalize report from its own payload.
    const Json& r = job.contains("report") ? job.at("report") : job;
    FormalMap F = map_from_json(r.at("input"));
    FormalMap F0 = map_from_json(r.at("normal_form"));
    FormalMap Phi = map_from_json(r.at("conjugator"));
    auto residual = verify_conjugacy(F, F0, Phi);
    rep["command"] = "verify";
    rep["residual"] = residual.empty() ? "verified" : "violated";
    if (!residual.empty()) {
      rep["first_violation"] = {{"component", residual.front().component + 1},
                                {"index", {residual.front().index[0], residual.front().index[1]}},
                                {"value", rat_to_string(residual.front().value)}};
      throw std::logic_error("verify: conjugacy residual nonempty");
    }
  } else {
    throw std::invalid_argument("unknown command \"" + command + "\"");
  }
  if (!warning.empty()) rep["warning"] = warning;
  return rep;
}

void print_text_report(const Json& rep, std::ostream& os) {
  os << "command: " << rep.value("command", std::string("?")) << "\n";
  if (rep.contains("mode")) os << "mode: " << rep["mode"].get<std::string>() << "\n";
  if (rep.contains("equivalent"))
    os << "verdict: " << (rep["equivalent"].get<bool>() ? "equivalent" : "inequivalent") << " ("
       << rep.value("reason", std::string()) << ")\n";
  if (rep.contains("pass"))
    os << "result: " << (rep["pass"].get<bool>() ? "pass" : "fail") << "\n";
  if (rep.contains("resonances")) {
    os << "resonances:";
    for (const auto& r : rep["resonances"])
      os << " (comp " << r["component"].get<int>() << ", (" << r["index"][0].get<int>() << ","
         << r["index"][1].get<int>() << "))";
    os << "\n";
  }
  if (rep.contains("certificate_summary")) {
    const auto& s = rep["certificate_summary"];
    os << "certificates: worst margin " << s["worst_margin"].get<long long>()
       << (s["all_nonnegative"].get<bool>() ? " (all nonnegative)" : " (VIOLATION)") << "\n";
    if (s.contains("convergence_radius"))
      os << "convergence radius: " << s["convergence_radius"].get<std::string>() << "\n";
  }
  if (rep.contains("residual")) os << "residual: " << rep["residual"].get<std::string>() << "\n";
  if (rep.contains("pdj"))
    os << "pdj form: " << rep["pdj"]["form"].dump() << "\n";
  if (rep.contains("witness")) os << "witness: " << rep["witness"].dump() << "\n";
  if (rep.contains("offending")) os << "offending: " << rep["offending"].dump() << "\n";
  if (rep.contains("warning")) os << "warning: " << rep["warning"].get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic normal form and certificate toolkit"};
  std::string command, input_path, tau_path, report_format = "text";
  unsigned degree = 0;
  std::string mode;
  bool batch = false;

  app.add_option("command", command, "normalize|pdj|equiv|resonances|dyncheck|verify")
      ->required();
  app.add_option("--input", input_path, "job JSON file")->required();
  app.add_option("--degree", degree, "working truncation degree override");
  app.add_option("--mode", mode, "auto|repelling|semihyperbolic|generic override");
  app.add_option("--tau", tau_path, "tau descriptor JSON file");
  app.add_option("--report", report_format, "json|text")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--batch", batch, "input file holds an array of jobs");
  CLI11_PARSE(app, argc, argv);

  int exit_code = 0;
  try {
    JobOverrides ov;
    if (degree > 0) ov.degree = degree;
    if (!mode.empty()) ov.mode = mode;
    if (!tau_path.empty()) ov.tau = load_json_file(tau_path);

    Json input = load_json_file(input_path);
    Json reports = Json::array();
    auto run_one = [&](Json job) {
      if (!job.contains("command")) job["command"] = command;
      if (job.at("command").get<std::string>() != command)
        throw std::invalid_argument("job command does not match the invoked command");
      reports.push_back(run_job(job, ov));
    };
    if (batch) {
      if (!input.is_array()) throw std::invalid_argument("--batch expects a JSON array");
      for (const auto& job : input) run_one(job);
    } else {
      run_one(input);
    }

    if (report_format == "json") {
      std::cout << (batch ? reports : reports.front()).dump(2) << "\n";
    } else {
      for (const auto& rep : reports) print_text_report(rep, std::cout);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    exit_code = 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    exit_code = 2;
  } catch (const std::logic_error& e) {
    // includes internal certificate violations raised by the drivers
    std::cerr << "certificate violation: " << e.what() << "\n";
    exit_code = 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    exit_code = 2;
  }
  return exit_code;
}
