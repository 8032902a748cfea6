#include "l2disc_cli/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "l2disc/bounds.hpp"
#include "l2disc/census.hpp"
#include "l2disc/discrepancy.hpp"
#include "l2disc/errors.hpp"
#include "l2disc/haar.hpp"
#include "l2disc/pointset.hpp"
#include "l2disc/verify.hpp"

namespace l2disc::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct Options {
  // generate
  std::string family;
  int n = -1;
  int k = -1;
  bool symmetrize = false;
  std::string out;
  // shared
  std::string in;
  std::uint64_t seed = kDefaultSeed;
  int level = 0;
  // l2
  bool exact = false;
  std::size_t oracle_samples = 0;
  // haar
  std::string dump;
  // bounds
  int grid = 4097;
  std::string table;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string g12(double v) { return fmt::format("{:.12g}", v); }

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError(fmt::format("cannot open {} for writing", path));
  return f;
}

std::string cmd_generate(const Options& o) {
  PointSet set = [&o] {
    if (o.family == "hammersley") {
      if (o.n < 0) throw UsageError("generate --family hammersley requires --n");
      return hammersley(o.n);
    }
    if (o.family == "fibonacci") {
      if (o.k < 0) throw UsageError("generate --family fibonacci requires --k");
      return fibonacci_lattice(o.k, o.symmetrize);
    }
    if (o.n < 0) throw UsageError("generate --family random requires --n");
    return random_uniform(static_cast<std::size_t>(o.n), o.seed);
  }();
  save(set, o.out);
  return fmt::format("wrote {} points to {}\n", set.size(), o.out);
}

std::string cmd_l2(const Options& o) {
  const PointSet set = load(o.in);
  std::string s;
  const double l2 = l2_squared(set);
  s += fmt::format("N = {}\n", set.size());
  s += fmt::format("l2_squared = {}\n", g12(l2));
  if (o.exact) s += fmt::format("l2_squared_exact = {}\n", to_string(l2_squared_exact(set)));
  s += fmt::format("l2 = {}\n", g12(std::sqrt(l2)));
  if (set.size() >= 2) {
    s += fmt::format("normalized_ratio = {}\n", g12(normalized_ratio(set)));
  } else {
    s += "normalized_ratio = undefined (N < 2)\n";
  }
  if (o.oracle_samples > 0) {
    const auto est = l2_oracle(set, o.oracle_samples, o.seed);
    s += fmt::format("oracle = {} +- {} (samples {}, seed {})\n", g12(est.mean),
                     g12(est.std_error), est.samples, o.seed);
  }
  return s;
}

std::string cmd_haar(const Options& o) {
  const PointSet set = load(o.in);
  const auto partial = parseval_levels(set, o.level);
  const double l2 = l2_squared(set);
  std::string s = "level,partial_sum,fraction\n";
  for (std::size_t l = 0; l < partial.size(); ++l) {
    s += fmt::format("{},{},{}\n", l, g12(partial[l]), g12(partial[l] / l2));
  }
  s += fmt::format("l2_squared = {}\n", g12(l2));
  if (!o.dump.empty()) {
    auto f = open_out(o.dump);
    write_coefficients_csv(f, set, o.level);
    s += fmt::format("coefficients written to {}\n", o.dump);
  }
  return s;
}

struct Outcome {
  std::string text;
  bool consistent = true;
};

Outcome cmd_census(const Options& o) {
  const PointSet set = load(o.in);
  if (o.level < 0) throw DomainError("census: level must be nonnegative");
  std::vector<LevelCensus> levels;
  for (int l = 0; l <= o.level; ++l) levels.push_back(level_census(set, l));
  std::ostringstream s;
  write_counts_csv(s, levels);
  s << '\n';
  write_types_csv(s, levels);
  s << '\n';
  bool all = true;
  for (const auto& c : check_identities(set, o.level)) {
    all = all && c.pass;
    s << fmt::format("{} {} level {}", c.pass ? "PASS" : "FAIL", c.name, c.level);
    if (!c.pass) s << ": " << c.detail;
    s << '\n';
  }
  s << (all ? "all identities PASS\n" : "identity violations found\n");
  return {s.str(), all};
}

Outcome cmd_master(const Options& o) {
  const PointSet set = load(o.in);
  const MasterTerms t = master_rhs(set);
  const ProofChain chain = proof_chain(set);
  std::string s;
  s += fmt::format("N = {}\nM = {}\nkappa = {}\n", set.size(), t.M, g12(t.kappa));
  s += fmt::format("l2_squared = {}\n", g12(chain.l2_squared));
  s += fmt::format("master_rhs = {}\n", g12(t.total));
  s += fmt::format("  empty_direct = {}\n  empty_tail = {}\n", g12(t.empty_direct),
                   g12(t.empty_tail));
  s += fmt::format("  bundles_M = {}\n  bundles_M1 = {}\n", g12(t.bundles_M), g12(t.bundles_M1));
  s += fmt::format("hm_rhs = {}\n", g12(chain.hm));
  s += fmt::format("slack l2 - master = {}\n", g12(chain.l2_squared - t.total));
  s += fmt::format("slack master - hm = {}\n", g12(t.total - chain.hm));
  s += fmt::format("census_route = {}\nprimed_route = {}\n", g12(chain.census_route),
                   g12(chain.primed_route));
  s += fmt::format("level_route = {}\nlog_route = {}\n", g12(chain.level_route),
                   g12(chain.log_route));
  const auto bad = chain.violations();
  for (const auto& v : bad) s += fmt::format("VIOLATION {}\n", v);
  s += bad.empty() ? "chain verified\n" : "chain violated\n";
  return {s, bad.empty()};
}

std::string cmd_bounds(const Options& o) {
  BoundOptions opt;
  opt.grid = o.grid;
  const BoundReport r = theorem_constants(opt);
  const HmCorrected hm = hm_corrected();
  std::string s;
  s += fmt::format("delta_min = {} ({})\n", to_string(r.delta_min_exact), g12(r.delta_min));
  s += fmt::format("c_bar_lower = {}\n", g12(r.c_bar_lower));
  s += fmt::format("kappa0 = {}\n", g12(r.kappa0));
  s += fmt::format("delta_max = {}\n", g12(r.delta_max));
  s += fmt::format("b_bar_lower = {}\n", g12(r.b_bar_lower));
  s += fmt::format("branch_switch = {}\n", g12(r.branch_switch));
  s += fmt::format("sign_changes = {} (grid {})\n", r.sign_changes, r.grid);
  s += fmt::format("hm_w_at_one = {}\n", to_string(hm.w_at_one));
  s += fmt::format("hm_y_max = {}\n", to_string(hm.y_max));
  s += fmt::format("hm_w_max = {}\n", to_string(hm.w_max));
  s += fmt::format("hm_cbar = {}\n", g12(r.hm_cbar));
  s += fmt::format("hm_bbar = {}\n", g12(r.hm_bbar));
  s += "kappa,diagonal_min,grid_min,grid_alpha,grid_beta\n";
  for (const auto& c : r.certificates) {
    s += fmt::format("{},{},{},{},{}\n", g12(c.kappa), g12(c.diagonal_min), g12(c.grid_min),
                     g12(c.grid_alpha), g12(c.grid_beta));
  }
  if (!o.table.empty()) {
    auto f = open_out(o.table);
    write_kappa_table_csv(f, kappa_table(o.grid));
    s += fmt::format("kappa table written to {}\n", o.table);
  }
  return s;
}

Outcome cmd_verify(const Options& o) {
  std::string s;
  bool all = true;
  for (const auto& c : run_property_battery(o.seed)) {
    all = all && c.pass;
    s += fmt::format("{} {}", c.pass ? "PASS" : "FAIL", c.name);
    if (!c.pass) s += ": " + c.detail;
    s += '\n';
  }
  s += all ? "all checks PASS\n" : "some checks FAILED\n";
  return {s, all};
}

}  // namespace

CommandResult run(const std::vector<std::string>& args, std::ostream& err) {
  Options o;
  CLI::App app{"L2-discrepancy of planar point sets and the constants of its lower bound",
               "l2disc"};
  app.require_subcommand(1);
  app.footer(
      "Point files: one point per line, two fields, each a decimal or p/q in [0,1).\n"
      "CSV outputs:\n"
      "  haar --dump      j1,j2,m1,m2,mu,derivation\n"
      "  census           level,r,a_r and level,b0,b1,b2\n"
      "  bounds --table   kappa,h,gamma,gamma_branch,delta\n"
      "Exit codes: 0 ok, 1 domain error, 2 parse/IO/usage error, 3 consistency error.");

  auto* gen = app.add_subcommand("generate", "Write a point set to a file");
  gen->add_option("--family", o.family, "hammersley, fibonacci or random")
      ->required()
      ->check(CLI::IsMember({"hammersley", "fibonacci", "random"}));
  gen->add_option("--n", o.n, "hammersley exponent or random point count");
  gen->add_option("--k", o.k, "Fibonacci index");
  gen->add_option("--seed", o.seed, "random seed")->capture_default_str();
  gen->add_flag("--symmetrize", o.symmetrize, "add the reflections (x, 1 - y)");
  gen->add_option("--out", o.out, "output file")->required();

  auto* l2 = app.add_subcommand("l2", "Squared L2-discrepancy and normalized ratio");
  l2->add_option("--in", o.in, "point file")->required();
  l2->add_flag("--exact", o.exact, "also print the exact rational value");
  l2->add_option("--oracle-samples", o.oracle_samples, "Monte Carlo samples");
  l2->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();

  auto* haar = app.add_subcommand("haar", "Parseval partial sums of the Haar expansion");
  haar->add_option("--in", o.in, "point file")->required();
  haar->add_option("--level", o.level, "highest level")->required();
  haar->add_option("--dump", o.dump, "write every coefficient as CSV");

  auto* census = app.add_subcommand("census", "Occupancy census and its identities");
  census->add_option("--in", o.in, "point file")->required();
  census->add_option("--level", o.level, "highest level")->required();

  auto* master = app.add_subcommand("master", "Lower-bound chain on one point set");
  master->add_option("--in", o.in, "point file")->required();

  auto* bounds = app.add_subcommand("bounds", "Constants of the lower bound");
  bounds->add_option("--grid", o.grid, "kappa grid size")->capture_default_str();
  bounds->add_option("--table", o.table, "write the kappa table as CSV");

  auto* verify = app.add_subcommand("verify", "Run the property battery");
  verify->add_option("--seed", o.seed, "seed for the random sets")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return {kSuccess, app.help()};
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return {kParseError, {}};
  }

  try {
    if (gen->parsed()) return {kSuccess, cmd_generate(o)};
    if (l2->parsed()) return {kSuccess, cmd_l2(o)};
    if (haar->parsed()) return {kSuccess, cmd_haar(o)};
    if (bounds->parsed()) return {kSuccess, cmd_bounds(o)};
    Outcome r;
    if (census->parsed()) r = cmd_census(o);
    if (master->parsed()) r = cmd_master(o);
    if (verify->parsed()) r = cmd_verify(o);
    if (!r.consistent) err << "consistency check failed\n";
    return {r.consistent ? kSuccess : kConsistencyError, r.text};
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return {kParseError, {}};
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return {kDomainError, {}};
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return {kParseError, {}};
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return {kParseError, {}};
  } catch (const ConsistencyError& e) {
    err << "consistency error: " << e.what() << '\n';
    return {kConsistencyError, {}};
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return {kConsistencyError, {}};
  }
}

}  // namespace l2disc::cli
