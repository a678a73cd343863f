#pragma once

// Command-line front end. dispatch() parses argv, runs one subcommand and
// writes CSV/JSON to `out`; every failure prints exactly one diagnostic line
// to `err`. Exit codes: 0 ok, 1 usage or domain error, 2 counterexamples
// found, 3 budget exceeded.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tailbounds/bounds.hpp"
#include "tailbounds/chernoff.hpp"
#include "tailbounds/distributions.hpp"
#include "tailbounds/errors.hpp"
#include "tailbounds/exact.hpp"
#include "tailbounds/verify.hpp"

namespace tailbounds::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageOrDomain = 1,
  kCounterexamples = 2,
  kBudget = 3,
};

using Field = std::variant<std::monostate, std::string, double, std::uint64_t, bool>;
using Row = std::map<std::string, Field>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

/// 17 significant digits, enough to round-trip any binary64 value.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_field(const Field& f) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(const std::string& s) const { return csv_escape(s); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::uint64_t u) const { return std::to_string(u); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, f);
}

inline nlohmann::json json_field(const Field& f) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(const std::string& s) const { return s; }
    // JSON has no infinities; the log field of an impossible event is null.
    nlohmann::json operator()(double d) const {
      return std::isfinite(d) ? nlohmann::json(d) : nlohmann::json(nullptr);
    }
    nlohmann::json operator()(std::uint64_t u) const { return u; }
    nlohmann::json operator()(bool b) const { return b; }
  };
  return std::visit(Visitor{}, f);
}

inline void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out << (i ? "," : "") << csv_escape(t.columns[i]);
  }
  out << '\n';
  for (const Row& row : t.rows) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      const auto it = row.find(t.columns[i]);
      out << (i ? "," : "") << (it == row.end() ? std::string() : csv_field(it->second));
    }
    out << '\n';
  }
}

inline nlohmann::ordered_json table_json(const Table& t) {
  nlohmann::ordered_json doc;
  doc["command"] = t.command;
  doc["records"] = nlohmann::ordered_json::array();
  for (const Row& row : t.rows) {
    nlohmann::ordered_json rec;
    for (const auto& col : t.columns) {
      const auto it = row.find(col);
      rec[col] = it == row.end() ? nlohmann::json(nullptr) : json_field(it->second);
    }
    doc["records"].push_back(std::move(rec));
  }
  return doc;
}

inline void write_table(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << table_json(t).dump(2) << '\n';
  } else {
    write_csv(t, out);
  }
}

inline void put_query(Row& row, const TailQuery& q) {
  row["dist"] = std::string(to_string(q.family()));
  row["side"] = std::string(to_string(q.side));
  row["n"] = q.n;
  row["lambda"] = q.lambda;
  row["mu"] = q.mu();
}

inline Row bound_row(const TailQuery& q, const BoundReport& r) {
  Row row;
  put_query(row, q);
  row["method"] = std::string(to_string(r.method));
  row["direction"] = std::string(to_string(r.direction));
  row["log_bound"] = r.log_bound;
  row["bound"] = r.bound();
  row["applicable"] = r.applicable;
  row["notes"] = r.notes;
  return row;
}

inline nlohmann::ordered_json suite_json(const SuiteReport& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["mode"] = r.mode;
  j["tolerance"] = r.tolerance;
  j["points_checked"] = r.points_checked;
  j["skipped"] = r.skipped;
  j["max_violation"] = r.max_violation;
  j["counterexample_count"] = r.counterexamples.size();
  j["counterexamples"] = nlohmann::ordered_json::array();
  for (const auto& c : r.counterexamples) {
    nlohmann::ordered_json cj;
    cj["suite"] = c.suite;
    cj["check"] = c.check;
    cj["dist"] = std::string(to_string(c.query.family()));
    cj["side"] = std::string(to_string(c.query.side));
    cj["n"] = c.query.n;
    cj["lambda"] = c.query.lambda;
    cj["mu"] = c.query.mu();
    cj["lhs_log"] = json_field(c.lhs_log);
    cj["rhs_log"] = json_field(c.rhs_log);
    cj["violation"] = json_field(c.violation);
    j["counterexamples"].push_back(std::move(cj));
  }
  return j;
}

inline void write_suite_text(const SuiteReport& r, std::ostream& out) {
  out << "suite=" << r.suite << " mode=" << r.mode << " tolerance=" << format_double(r.tolerance)
      << " points=" << r.points_checked << " skipped=" << r.skipped
      << " counterexamples=" << r.counterexamples.size()
      << " max_violation=" << format_double(r.max_violation) << '\n';
  for (const auto& c : r.counterexamples) {
    out << "  counterexample check=\"" << c.check << "\" dist=" << to_string(c.query.family())
        << " side=" << to_string(c.query.side) << " n=" << c.query.n
        << " lambda=" << format_double(c.query.lambda) << " mu=" << format_double(c.query.mu())
        << " lhs_log=" << format_double(c.lhs_log) << " rhs_log=" << format_double(c.rhs_log)
        << " violation=" << format_double(c.violation) << '\n';
  }
}

inline Family parse_family(const std::string& s) {
  return s == "geometric" ? Family::Geometric : Family::Exponential;
}

inline Side parse_side(const std::string& s) { return s == "upper" ? Side::Upper : Side::Lower; }

inline CertificateMode parse_mode(const std::string& s) {
  return s == "paper" ? CertificateMode::PaperLiteral : CertificateMode::Repaired;
}

/// Grid file: {"mu": [...], "lambda": [...], "n": [...], "distributions":
/// ["geometric", "exponential"], "sides": ["upper", "lower"]}. Missing keys
/// fall back to the default grid.
inline GridSpec load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open grid file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("grid file is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw DomainError("grid file must hold a JSON object");
  GridSpec g = default_grid();
  try {
    if (doc.contains("mu")) g.mu_values = doc.at("mu").get<std::vector<double>>();
    if (doc.contains("lambda")) g.lambda_values = doc.at("lambda").get<std::vector<double>>();
    if (doc.contains("n")) g.n_values = doc.at("n").get<std::vector<std::uint64_t>>();
    if (doc.contains("distributions")) {
      g.families.clear();
      for (const auto& s : doc.at("distributions").get<std::vector<std::string>>()) {
        if (s != "geometric" && s != "exponential") {
          throw DomainError("grid: unknown distribution " + s);
        }
        g.families.push_back(parse_family(s));
      }
    }
    if (doc.contains("sides")) {
      g.sides.clear();
      for (const auto& s : doc.at("sides").get<std::vector<std::string>>()) {
        if (s != "upper" && s != "lower") throw DomainError("grid: unknown side " + s);
        g.sides.push_back(parse_side(s));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("grid file has a malformed field: " + std::string(e.what()));
  }
  validate(g);
  return g;
}

inline std::vector<std::uint64_t> parse_n_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw DomainError("--n-list: not an integer: " + item);
    }
    if (used != item.size() || v < 1) throw DomainError("--n-list: bad entry " + item);
    out.push_back(static_cast<std::uint64_t>(v));
  }
  if (out.empty()) throw DomainError("--n-list is empty");
  return out;
}

namespace detail {

inline std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct DistOptions {
  std::string dist;
  double mu = 0.0;
  double p = 0.0;
  double rho = 0.0;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* rho_opt = nullptr;

  void attach(CLI::App* cmd, bool dist_required = true) {
    auto* d = cmd->add_option("--dist", dist, "geometric or exponential")
                  ->check(CLI::IsMember({"geometric", "exponential"}));
    if (dist_required) d->required();
    mu_opt = cmd->add_option("--mu", mu, "mean");
    p_opt = cmd->add_option("--p", p, "geometric success probability");
    rho_opt = cmd->add_option("--rho", rho, "exponential rate");
    mu_opt->excludes(p_opt)->excludes(rho_opt);
    p_opt->excludes(rho_opt);
  }

  DistributionSpec spec() const {
    const Family f = parse_family(dist);
    if (*mu_opt) return make_spec(f, Parameter::Mean, mu);
    if (*p_opt) return make_spec(f, Parameter::SuccessProbability, p);
    if (*rho_opt) return make_spec(f, Parameter::Rate, rho);
    throw DomainError("one of --mu, --p, --rho is required");
  }
};

}  // namespace detail

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tail bounds for sums of i.i.d. geometric and exponential variables", "tailbounds"};
  app.require_subcommand(1);

  detail::DistOptions dist;
  double lambda = 0.0;
  std::uint64_t n = 0;
  std::string side;
  std::string method = "all";
  std::string mode = "repaired";
  std::string format = "csv";
  const auto side_check = CLI::IsMember({"upper", "lower"});
  const auto mode_check = CLI::IsMember({"paper", "repaired"});

  auto* eval = app.add_subcommand("eval", "evaluate bounds for one tail query");
  dist.attach(eval);
  eval->add_option("--lambda", lambda)->required();
  eval->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  eval->add_option("--side", side)->required()->check(side_check);
  eval->add_option("--method", method)
      ->required()
      ->check(CLI::IsMember({"theorem1", "certificate", "janson", "agrawal", "all"}));
  eval->add_option("--mode", mode)->check(mode_check);
  eval->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  bool use_mc = false;
  bool mc_only = false;
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  auto* exact_cmd = app.add_subcommand("exact", "exact tail probability and Monte Carlo check");
  detail::DistOptions exact_dist;
  exact_dist.attach(exact_cmd);
  exact_cmd->add_option("--lambda", lambda)->required();
  exact_cmd->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  exact_cmd->add_option("--side", side)->required()->check(side_check);
  exact_cmd->add_flag("--mc", use_mc, "add a Monte Carlo estimate");
  exact_cmd->add_flag("--mc-only", mc_only, "skip the exact computation");
  exact_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
  exact_cmd->add_option("--seed", seed);
  exact_cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);
  exact_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  bool numeric = false;
  double tol = 1e-10;
  std::string chernoff_side;
  auto* chern = app.add_subcommand("chernoff", "optimize a Chernoff exponent curve");
  detail::DistOptions chern_dist;
  chern_dist.attach(chern);
  chern->add_option("--lambda", lambda)->required();
  chern->add_option("--side", chernoff_side, "defaults to the side implied by lambda")
      ->check(side_check);
  chern->add_flag("--numeric", numeric, "also run the numeric optimizer");
  chern->add_option("--tol", tol);
  chern->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  std::string suite = "all";
  std::string grid_path;
  double tolerance = kDefaultTolerance;
  std::string verify_format = "text";
  auto* verify = app.add_subcommand("verify", "sweep a grid and check every inequality");
  verify->add_option("--suite", suite)
      ->check(CLI::IsMember({"theorem1", "proposition", "sandwich", "stirling", "comparisons",
                             "all"}));
  verify->add_option("--mode", mode)->check(mode_check);
  verify->add_option("--grid", grid_path, "grid JSON file");
  verify->add_option("--tolerance", tolerance);
  verify->add_option("--format", verify_format)->check(CLI::IsMember({"text", "json"}));

  std::string n_list;
  auto* asym = app.add_subcommand("asymptotics", "certified -ln Pr/(n rate) over a list of n");
  detail::DistOptions asym_dist;
  asym_dist.attach(asym);
  asym->add_option("--side", side)->required()->check(side_check);
  asym->add_option("--lambda", lambda)->required();
  asym->add_option("--n-list", n_list)->required();
  asym->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: kind=UsageError message=\"" << detail::one_line(e.what()) << "\"\n";
    return kUsageOrDomain;
  }

  try {
    if (*eval) {
      const TailQuery q = make_query(dist.spec(), n, lambda, parse_side(side));
      const CertificateMode cm = parse_mode(mode);
      Table t{"eval",
              {"dist", "side", "n", "lambda", "mu", "method", "direction", "log_bound", "bound",
               "applicable", "notes"},
              {}};
      if (method == "all") {
        for (const auto& r : compare_all(q, cm)) t.rows.push_back(bound_row(q, r));
      } else if (method == "theorem1") {
        t.rows.push_back(bound_row(q, thm1_bound(q)));
      } else if (method == "certificate") {
        t.rows.push_back(bound_row(q, certificate_bound(q, cm)));
      } else if (method == "janson") {
        BoundReport r = janson_bound(q);
        r.notes += (r.notes.empty() ? "" : "; ") + std::string("quadratic relaxation exponent ") +
                   format_double(janson_quadratic(q));
        t.rows.push_back(bound_row(q, r));
      } else {
        t.rows.push_back(bound_row(q, agrawal_bound(q)));
      }
      write_table(t, format, out);
      return kOk;
    }

    if (*exact_cmd) {
      const TailQuery q = make_query(exact_dist.spec(), n, lambda, parse_side(side));
      Table t{"exact",
              {"dist", "side", "n", "lambda", "mu", "method", "log_bound", "bound", "exact_log",
               "std_error", "trials", "seed", "generator_id", "notes"},
              {}};
      Field exact_log;
      if (!mc_only) {
        const LogProb lp = exact_tail(q);
        exact_log = lp.log_value;
        Row row;
        put_query(row, q);
        row["method"] = std::string("exact");
        row["log_bound"] = lp.log_value;
        row["bound"] = lp.probability();
        row["exact_log"] = lp.log_value;
        t.rows.push_back(std::move(row));
      }
      if (use_mc || mc_only) {
        const McEstimate est = mc_tail(q, trials, seed, threads);
        Row row;
        put_query(row, q);
        row["method"] = std::string("montecarlo");
        row["log_bound"] = std::log(est.estimate);
        row["bound"] = est.estimate;
        row["exact_log"] = exact_log;
        row["std_error"] = est.std_error;
        row["trials"] = est.trials;
        row["seed"] = est.seed;
        row["generator_id"] = est.generator_id;
        t.rows.push_back(std::move(row));
      }
      write_table(t, format, out);
      return kOk;
    }

    if (*chern) {
      const DistributionSpec spec = chern_dist.spec();
      const double mu = mean_of(spec);
      const Side s = chernoff_side.empty() ? (lambda < 1.0 ? Side::Lower : Side::Upper)
                                           : parse_side(chernoff_side);
      CurveFamily fam = CurveFamily::GeomUpper;
      if (family_of(spec) == Family::Geometric) {
        fam = s == Side::Upper ? CurveFamily::GeomUpper : CurveFamily::GeomLower;
      } else if (s == Side::Upper) {
        fam = CurveFamily::ExpUpper;
      } else {
        throw DomainError("no Chernoff exponent curve for the exponential lower tail");
      }
      const ExponentCurve curve = make_curve(fam, lambda, mu);
      Table t{"chernoff",
              {"family", "lambda", "mu", "method", "t_star", "exponent", "rate", "iterations"},
              {}};
      const auto add = [&](const OptimumReport& r) {
        t.rows.push_back(Row{{"family", std::string(to_string(fam))},
                             {"lambda", lambda},
                             {"mu", mu},
                             {"method", std::string(to_string(r.method))},
                             {"t_star", r.t_star},
                             {"exponent", r.value},
                             {"rate", r.rate},
                             {"iterations", r.iterations}});
      };
      add(closed_form_optimum(curve));
      if (numeric) add(numeric_optimum(curve, tol));
      write_table(t, format, out);
      return kOk;
    }

    if (*verify) {
      const GridSpec grid = grid_path.empty() ? default_grid() : load_grid(grid_path);
      const CertificateMode cm = parse_mode(mode);
      std::vector<SuiteReport> reports;
      if (suite == "all") {
        for (Suite s : {Suite::Theorem1, Suite::Proposition, Suite::Sandwich, Suite::Stirling,
                        Suite::Comparisons}) {
          reports.push_back(run_suite(s, grid, cm, tolerance));
        }
      } else {
        Suite s = Suite::Theorem1;
        for (Suite c : {Suite::Theorem1, Suite::Proposition, Suite::Sandwich, Suite::Stirling,
                        Suite::Comparisons}) {
          if (to_string(c) == suite) s = c;
        }
        reports.push_back(run_suite(s, grid, cm, tolerance));
      }
      bool failed = false;
      if (verify_format == "json") {
        nlohmann::ordered_json doc;
        doc["command"] = "verify";
        doc["suites"] = nlohmann::ordered_json::array();
        for (const auto& r : reports) doc["suites"].push_back(suite_json(r));
        out << doc.dump(2) << '\n';
      } else {
        for (const auto& r : reports) write_suite_text(r, out);
      }
      for (const auto& r : reports) failed = failed || !r.counterexamples.empty();
      return failed ? kCounterexamples : kOk;
    }

    if (*asym) {
      const DistributionSpec spec = asym_dist.spec();
      Table t{"asymptotics",
              {"dist", "side", "lambda", "mu", "n", "exact_log", "n_times_rate", "ratio",
               "certified_max"},
              {}};
      for (std::uint64_t k : parse_n_list(n_list)) {
        const TailQuery q = make_query(spec, k, lambda, parse_side(side));
        const AsymptoticRatio r = asymptotic_ratio(q);
        Row row;
        put_query(row, q);
        row["exact_log"] = r.exact_log;
        row["n_times_rate"] = r.n_times_rate;
        row["ratio"] = r.ratio;
        row["certified_max"] = r.certified_max;
        t.rows.push_back(std::move(row));
      }
      write_table(t, format, out);
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: kind=" << to_string(e.kind()) << " message=\"" << detail::one_line(e.what())
        << "\"\n";
    return e.kind() == ErrorKind::BudgetExceeded ? kBudget : kUsageOrDomain;
  }
  return kUsageOrDomain;
}

/// Convenience overload taking the arguments after the program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"tailbounds"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tailbounds::cli
