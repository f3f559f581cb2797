#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <hyperid/bailey_campaign.hpp>
#include <hyperid/catalog.hpp>

using nlohmann::ordered_json;
namespace hy = hyperid;

namespace {

int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// HYPERID_WORKERS beats the flag; 0 means "pick for me".
int resolve_workers(int flag_value) {
  if (const char* env = std::getenv("HYPERID_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1)
      return w;
  }
  if (flag_value >= 1)
    return flag_value;
  return default_workers();
}

std::string param_names(const hy::IdentityDef& def) {
  std::string out;
  for (size_t i = 0; i < def.params.size(); ++i) {
    if (i)
      out += ",";
    out += def.params[i];
  }
  if (def.has_N)
    out += out.empty() ? "N" : ",N";
  return out;
}

int cmd_list() {
  for (const auto& def : hy::catalog()) {
    const std::string tag = def.tag.empty() ? "—" : "Eq. (" + def.tag + ")";
    std::cout << def.id << " → " << tag << " | " << hy::kind_str(def.kind) << " | "
              << param_names(def) << " | " << def.structure.label << "\n";
  }
  return 0;
}

// --- report rendering -------------------------------------------------------

ordered_json assignment_json(const hy::IdentityDef& def, const hy::Assignment& a) {
  ordered_json j = ordered_json::object();
  for (const auto& p : def.params)
    j[p] = a.at(p).str();
  if (a.N)
    j["N"] = std::to_string(*a.N);
  return j;
}

ordered_json derived_json(const hy::DerivedParams& d) {
  ordered_json j = ordered_json::object();
  auto put = [&](const char* key, const std::optional<hy::Rat>& v) {
    if (v)
      j[key] = v->str();
  };
  put("g", d.g);
  put("h", d.h);
  put("k", d.k);
  put("A", d.A);
  put("B", d.B);
  put("D", d.D);
  put("c", d.c);
  put("lambda_sq", d.lambda_sq);
  put("A_prime", d.A_prime);
  return j;
}

ordered_json report_json(const hy::IdentityDef& def, const hy::VerificationReport& r) {
  ordered_json j;
  j["identity"] = r.def_id;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["passes"] = r.passes;
  j["rejected_degenerate"] = r.rejected_degenerate;
  ordered_json fails = ordered_json::array();
  for (const auto& f : r.failures) {
    ordered_json e;
    e["assignment"] = assignment_json(def, f.assignment);
    e["lhs"] = f.lhs_value;
    e["rhs"] = f.rhs_value;
    fails.push_back(std::move(e));
  }
  j["failures"] = std::move(fails);
  j["derived"] = derived_json(r.derived_sample);
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

std::string derived_line(const hy::DerivedParams& d) {
  std::string out;
  auto put = [&](const char* key, const std::optional<hy::Rat>& v) {
    if (!v)
      return;
    if (!out.empty())
      out += "  ";
    out += std::string(key) + " = " + v->str();
  };
  put("g", d.g);
  put("h", d.h);
  put("k", d.k);
  put("A", d.A);
  put("B", d.B);
  put("D", d.D);
  put("c", d.c);
  put("lambda_sq", d.lambda_sq);
  put("A_prime", d.A_prime);
  return out.empty() ? "-" : out;
}

std::string human_report(const hy::IdentityDef& def, const hy::VerificationReport& r) {
  std::string s;
  s += "identity    " + r.def_id + "\n";
  s += "seed        " + std::to_string(r.seed) + "\n";
  s += "trials      " + std::to_string(r.trials) + "\n";
  s += "passes      " + std::to_string(r.passes) + "\n";
  s += "rejected    " + std::to_string(r.rejected_degenerate) + "\n";
  s += "derived     " + derived_line(r.derived_sample) + "\n";
  s += "failures    " + std::to_string(r.failures.size()) + "\n";
  for (const auto& f : r.failures) {
    s += "  at " + assignment_json(def, f.assignment).dump() + "\n";
    s += "    lhs " + f.lhs_value + "\n";
    s += "    rhs " + f.rhs_value + "\n";
  }
  s += "elapsed_ms  " + std::to_string(r.elapsed_ms) + "\n";
  return s;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f)
    throw hy::Error("cannot open output path: " + out_path);
  f << text;
}

std::vector<std::string> expand_ids(const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) {
    if (id == "all") {
      for (const auto& def : hy::catalog())
        out.push_back(def.id);
    } else {
      hy::find_def(id); // throws UnknownIdentity early
      out.push_back(id);
    }
  }
  return out;
}

int cmd_verify(const std::vector<std::string>& ids, hy::CampaignConfig cfg,
               const std::string& format, const std::string& out_path) {
  try {
    const auto expanded = expand_ids(ids);
    std::vector<hy::VerificationReport> reports;
    reports.reserve(expanded.size());
    for (const auto& id : expanded)
      reports.push_back(hy::run_campaign(id, cfg));

    std::string text;
    if (format == "json") {
      ordered_json arr = ordered_json::array();
      for (const auto& r : reports)
        arr.push_back(report_json(hy::find_def(r.def_id), r));
      text = arr.dump(2) + "\n";
    } else if (format == "csv") {
      text = "identity,seed,trials,passes,rejected_degenerate,failures,elapsed_ms\n";
      for (const auto& r : reports)
        text += r.def_id + "," + std::to_string(r.seed) + "," + std::to_string(r.trials) +
                "," + std::to_string(r.passes) + "," + std::to_string(r.rejected_degenerate) +
                "," + std::to_string(r.failures.size()) + "," + std::to_string(r.elapsed_ms) +
                "\n";
    } else {
      for (size_t i = 0; i < reports.size(); ++i) {
        if (i)
          text += "\n";
        text += human_report(hy::find_def(reports[i].def_id), reports[i]);
      }
    }
    emit(text, out_path);

    size_t total_failures = 0;
    for (const auto& r : reports)
      total_failures += r.failures.size();
    return total_failures ? 1 : 0;
  } catch (const hy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_eval(const std::string& num, const std::string& den, const std::string& z,
             bool has_n, unsigned n, unsigned digits) {
  hy::SeriesSpec spec;
  try {
    if (!num.empty())
      spec.numerators = hy::parse_entry_list(num);
    if (!den.empty())
      spec.denominators = hy::parse_entry_list(den);
    spec.z = hy::Rat::parse(z);
    if (has_n)
      spec.termination = n;
  } catch (const hy::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    if (!spec.termination) {
      // a nonpositive-integer numerator still terminates the sum
      if (auto eff = hy::detail::effective_termination(spec))
        spec.termination = static_cast<unsigned>(*eff);
    }
    if (spec.termination) {
      std::cout << hy::eval_terminating(spec).str() << "\n";
    } else {
      std::cout << hy::eval_nonterminating(spec, digits).str(static_cast<int>(digits))
                << "\n";
    }
    return 0;
  } catch (const hy::PoleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hy::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

ordered_json bailey_json(const hy::BaileyCampaignReport& r) {
  ordered_json j;
  j["setup"] = r.setup;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["rejected_degenerate"] = r.rejected_degenerate;
  j["beta_closed"] = ordered_json{{"checks", r.beta_checks}, {"failures", r.beta_failures}};
  j["gamma_closed"] =
      ordered_json{{"checks", r.gamma_checks}, {"failures", r.gamma_failures}};
  j["transform"] =
      ordered_json{{"passes", r.transform_passes}, {"failures", r.transform_failures}};
  j["statement"] =
      ordered_json{{"matches", r.statement_matches}, {"failures", r.statement_failures}};
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

std::string bailey_human(const hy::BaileyCampaignReport& r) {
  std::string s;
  s += "setup         " + r.setup + "\n";
  s += "seed          " + std::to_string(r.seed) + "\n";
  s += "trials        " + std::to_string(r.trials) + "\n";
  s += "rejected      " + std::to_string(r.rejected_degenerate) + "\n";
  s += "beta_closed   " + std::to_string(r.beta_checks) + " checks, " +
       std::to_string(r.beta_failures) + " failures\n";
  s += "gamma_closed  " + std::to_string(r.gamma_checks) + " checks, " +
       std::to_string(r.gamma_failures) + " failures\n";
  s += "transform     " + std::to_string(r.transform_passes) + " passes, " +
       std::to_string(r.transform_failures) + " failures\n";
  s += "statement     " + std::to_string(r.statement_matches) + " matches, " +
       std::to_string(r.statement_failures) + " failures\n";
  s += "elapsed_ms    " + std::to_string(r.elapsed_ms) + "\n";
  return s;
}

int cmd_bailey(const std::string& setup, unsigned long seed, int trials, unsigned max_n,
               const std::string& format, const std::string& out_path) {
  try {
    const hy::BaileyCampaignReport rep =
        hy::run_bailey_campaign(hy::parse_setup_kind(setup), seed, trials, max_n);
    std::string text;
    if (format == "json") {
      ordered_json arr = ordered_json::array();
      arr.push_back(bailey_json(rep));
      text = arr.dump(2) + "\n";
    } else if (format == "csv") {
      text = "setup,seed,trials,rejected_degenerate,beta_failures,gamma_failures,"
             "transform_failures,statement_failures,elapsed_ms\n";
      text += rep.setup + "," + std::to_string(rep.seed) + "," + std::to_string(rep.trials) +
              "," + std::to_string(rep.rejected_degenerate) + "," +
              std::to_string(rep.beta_failures) + "," + std::to_string(rep.gamma_failures) +
              "," + std::to_string(rep.transform_failures) + "," +
              std::to_string(rep.statement_failures) + "," + std::to_string(rep.elapsed_ms) +
              "\n";
    } else {
      text = bailey_human(rep);
    }
    emit(text, out_path);
    return rep.total_failures() ? 1 : 0;
  } catch (const hy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact and high-precision verification of hypergeometric summation and "
               "transformation formulas"};
  app.require_subcommand(1);

  CLI::App* list_cmd = app.add_subcommand("list", "print the identity catalog");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run a seeded verification campaign over an identity");
  std::vector<std::string> ids;
  hy::CampaignConfig cfg;
  int workers_flag = 0;
  std::string v_format = "human", v_out;
  verify_cmd->add_option("--id", ids, "identity id from `list`, or 'all'; repeatable")
      ->required();
  verify_cmd->add_option("--trials", cfg.trials, "instances per identity")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", cfg.seed, "campaign seed; trial i uses seed+i");
  verify_cmd->add_option("--max-n", cfg.max_n, "largest termination order sampled");
  verify_cmd->add_option("--digits", cfg.digits, "target digits for numeric entries")
      ->check(CLI::Range(6u, 200u));
  verify_cmd->add_option("--workers", workers_flag,
                         "worker threads (0 = auto; HYPERID_WORKERS overrides)");
  verify_cmd->add_option("--format", v_format, "report format")
      ->check(CLI::IsMember({"json", "csv", "human"}));
  verify_cmd->add_option("--out", v_out, "write the report here instead of stdout");

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate one series from its text form");
  std::string e_num, e_den, e_z = "1";
  unsigned e_n = 0, e_digits = 12;
  eval_cmd->add_option("--num", e_num, "numerator parameters, comma separated (x~L for a "
                                       "conjugate pair with center x and lambda^2 = L)");
  eval_cmd->add_option("--den", e_den, "denominator parameters, comma separated");
  eval_cmd->add_option("--z", e_z, "series argument, 1 or -1");
  CLI::Option* e_n_opt = eval_cmd->add_option("--N", e_n, "termination order");
  eval_cmd->add_option("--digits", e_digits, "digits for a non-terminating value")
      ->check(CLI::Range(1u, 200u));

  CLI::App* bailey_cmd =
      app.add_subcommand("bailey", "replay a transform-engine derivation campaign");
  std::string b_setup;
  unsigned long b_seed = 1;
  int b_trials = 50;
  unsigned b_max_n = 20;
  std::string b_format = "human", b_out;
  bailey_cmd->add_option("--setup", b_setup, "which instantiation to drive")
      ->required()
      ->check(CLI::IsMember({"first", "second"}));
  bailey_cmd->add_option("--trials", b_trials, "admissible draws to check")
      ->check(CLI::PositiveNumber);
  bailey_cmd->add_option("--seed", b_seed, "campaign seed; trial i uses seed+i");
  bailey_cmd->add_option("--max-n", b_max_n, "largest termination order sampled");
  bailey_cmd->add_option("--format", b_format, "report format")
      ->check(CLI::IsMember({"json", "csv", "human"}));
  bailey_cmd->add_option("--out", b_out, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*list_cmd)
    return cmd_list();
  if (*verify_cmd) {
    cfg.workers = resolve_workers(workers_flag);
    return cmd_verify(ids, cfg, v_format, v_out);
  }
  if (*eval_cmd)
    return cmd_eval(e_num, e_den, e_z, e_n_opt->count() > 0, e_n, e_digits);
  if (*bailey_cmd)
    return cmd_bailey(b_setup, b_seed, b_trials, b_max_n, b_format, b_out);
  return 2;
}
