#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "bifree/bnc.hpp"
#include "bifree/conjvar.hpp"
#include "bifree/errors.hpp"
#include "bifree/fock.hpp"
#include "bifree/json_io.hpp"
#include "bifree/matrix_lift.hpp"
#include "bifree/moments.hpp"
#include "bifree/verify.hpp"

using namespace bifree;

namespace {

struct RunConfig {
  int d = 1;
  int max_order = 4;
  double tolerance = 1e-9;
  int truncation = 8;
  std::uint64_t seed = 20240917;
  std::string format = "json";
};

json read_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) {
      // allow inline JSON
      if (!path.empty() && (path.front() == '{' || path.front() == '[')) text = path;
      else throw InputError("cannot open '" + path + "'");
    } else {
      text.assign(std::istreambuf_iterator<char>(in), {});
    }
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

using ojson = nlohmann::ordered_json;

ojson envelope(const std::string& command) { return {{"schema", 1}, {"command", command}}; }

std::shared_ptr<FockModel> load_model(const std::string& path, const RunConfig& cfg) {
  if (path.empty()) {
    if (cfg.d != 1) throw InputError("--model is required for d > 1");
    return make_bisemicircular({CPMap::identity(1)}, {CPMap::identity(1)});
  }
  return fock_model_from_json(read_json(path));
}

void emit(const ojson& j) { std::cout << j.dump(2) << "\n"; }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string blocks_text(const Blocks& b) { return blocks_to_json(b).dump(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bifree: bi-free probability with amalgamation at small order"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "Seed for randomized property trials")->capture_default_str();
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--tolerance", cfg.tolerance, "Vanishing tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("-d,--dim", cfg.d, "Dimension of B = M_d")->check(CLI::Range(1, 8))->capture_default_str();
  app.add_option("--truncation", cfg.truncation, "Fock truncation depth")->check(CLI::Range(1, 16))->capture_default_str();

  std::function<int()> action;

  // bnc
  auto* bnc = app.add_subcommand("bnc", "Bi-non-crossing partitions");
  bnc->require_subcommand(1);
  std::string chi_text, sigma_text, pi_text;
  auto* bnc_enum = bnc->add_subcommand("enum", "Enumerate BNC(chi)");
  bnc_enum->add_option("--chi", chi_text, "chi-word over {l,r}")->required();
  bnc_enum->callback([&] {
    action = [&] {
      const ChiWord chi = ChiWord::parse(chi_text);
      const auto parts = enumerate_bnc(chi);
      if (cfg.format == "csv") {
        std::cout << "index,chi,blocks\n";
        for (std::size_t k = 0; k < parts.size(); ++k)
          std::cout << k << ',' << chi.str() << ',' << csv_escape(blocks_text(parts[k].blocks())) << '\n';
        return 0;
      }
      ojson j = envelope("bnc enum");
      j["chi"] = chi.str();
      j["count"] = parts.size();
      j["partitions"] = json::array();
      for (const auto& p : parts) j["partitions"].push_back(ojson(to_json(p)));
      emit(j);
      return 0;
    };
  });
  auto* bnc_mob = bnc->add_subcommand("mobius", "Moebius function mu_BNC(sigma, pi)");
  bnc_mob->add_option("--chi", chi_text, "chi-word over {l,r}")->required();
  bnc_mob->add_option("--sigma", sigma_text, "JSON block list")->required();
  bnc_mob->add_option("--pi", pi_text, "JSON block list")->required();
  bnc_mob->callback([&] {
    action = [&] {
      const ChiWord chi = ChiWord::parse(chi_text);
      const BncPartition sigma(chi, blocks_from_json(read_json(sigma_text)));
      const BncPartition pi(chi, blocks_from_json(read_json(pi_text)));
      ojson j = envelope("bnc mobius");
      j["chi"] = chi.str();
      j["sigma"] = ojson(blocks_to_json(sigma.blocks()));
      j["pi"] = ojson(blocks_to_json(pi.blocks()));
      j["mobius"] = mobius_bnc(sigma, pi);
      emit(j);
      return 0;
    };
  });

  // mc
  auto* mc = app.add_subcommand("mc", "Moment-cumulant transforms");
  mc->require_subcommand(1);
  std::string table_path, model_path, word_text;
  auto emit_table = [&](const std::string& command, const PartitionTable& t) {
    if (cfg.format == "csv") {
      std::cout << "chi,partition,entry,re,im\n";
      for (const auto& e : t)
        for (int i = 0; i < e.value.rows(); ++i)
          for (int k = 0; k < e.value.cols(); ++k)
            std::cout << e.partition.chi().str() << ',' << csv_escape(blocks_text(e.partition.blocks())) << ','
                      << i + 1 << k + 1 << ',' << e.value(i, k).real() << ',' << e.value(i, k).imag() << '\n';
      return;
    }
    ojson j = envelope(command);
    j["table"] = ojson(to_json(t));
    emit(j);
  };
  auto* to_cum = mc->add_subcommand("to-cumulants", "Moment table to cumulant table");
  to_cum->add_option("--table", table_path, "Moment table JSON (file, '-' or inline)");
  to_cum->add_option("--model", model_path, "Fock model JSON; with --word computes the moment table first");
  to_cum->add_option("--word", word_text, "Operands, one symbol each, e.g. \"S1 D1 S1\"");
  to_cum->callback([&] {
    action = [&] {
      PartitionTable moments;
      if (!table_path.empty()) {
        moments = table_from_json(read_json(table_path));
      } else {
        if (word_text.empty()) throw CLI::ValidationError("mc to-cumulants needs --table or --word");
        auto model = load_model(model_path, cfg);
        const Monomial word = parse_word(word_text);
        std::vector<Side> sides;
        std::vector<Monomial> ops;
        for (const auto& f : word) {
          sides.push_back(model->symbol(f.name).side);
          ops.push_back({f});
        }
        CachedFunctional cached(*model);
        moments = moment_table(cached, ChiWord(sides), ops);
      }
      emit_table("mc to-cumulants", cumulants_from_moments(moments));
      return 0;
    };
  });
  auto* to_mom = mc->add_subcommand("to-moments", "Cumulant table to moment table");
  to_mom->add_option("--table", table_path, "Cumulant table JSON (file, '-' or inline)")->required();
  to_mom->callback([&] {
    action = [&] {
      emit_table("mc to-moments", moments_from_cumulants(table_from_json(read_json(table_path))));
      return 0;
    };
  });

  // bifree test
  auto* bf = app.add_subcommand("bifree", "Bi-freeness via vanishing mixed cumulants");
  bf->require_subcommand(1);
  auto* bf_test = bf->add_subcommand("test", "Test every mixed cumulant up to --max-order");
  bf_test->add_option("--model", model_path, "Fock model JSON {\"d\",\"left\",\"right\"}");
  bf_test->add_option("--max-order", cfg.max_order, "Largest cumulant order")->check(CLI::Range(1, 8))->capture_default_str();
  bf_test->callback([&] {
    action = [&] {
      auto model = load_model(model_path, cfg);
      const auto r = bifree_test(*model, cfg.max_order, cfg.tolerance);
      if (cfg.format == "csv") {
        std::cout << "word,chi,size\n";
        for (const auto& e : r.entries) std::cout << csv_escape(e.word) << ',' << e.chi << ',' << e.size << '\n';
        return r.pass ? 0 : 1;
      }
      ojson j = envelope("bifree test");
      j["max_order"] = r.max_order;
      j["tested"] = r.tested;
      j["max_residual"] = r.max_residual;
      j["max_by_order"] = r.max_by_order;
      j["pass"] = r.pass;
      j["entries"] = json::array();
      for (const auto& e : r.entries) j["entries"].push_back({{"word", e.word}, {"chi", e.chi}, {"size", e.size}});
      emit(j);
      return r.pass ? 0 : 1;
    };
  });

  // fock moment
  auto* fock = app.add_subcommand("fock", "Fock-space models");
  fock->require_subcommand(1);
  auto* fock_moment = fock->add_subcommand("moment", "E(word) in a bi-semicircular Fock model");
  fock_moment->add_option("--model", model_path, "Fock model JSON; default scalar S1, D1");
  fock_moment->add_option("--word", word_text, "Symbols, e.g. \"S1 S1 D1 D1\"")->required();
  fock_moment->callback([&] {
    action = [&] {
      auto model = load_model(model_path, cfg);
      ojson j = envelope("fock moment");
      j["word"] = word_text;
      j["value"] = ojson(to_json(eval_moment_full(*model, parse_word(word_text))));
      emit(j);
      return 0;
    };
  });

  // conj check
  auto* conj = app.add_subcommand("conj", "Conjugate variables");
  conj->require_subcommand(1);
  std::string target, xi_text, eta_path;
  double xi_scale = 1.0;
  int max_n = 6, max_n_coef = -1, solve_degree = -1;
  std::vector<std::string> ctx_left, ctx_right;
  auto* conj_check = conj->add_subcommand("check", "Residual of the conjugate-variable relations");
  conj_check->add_option("--model", model_path, "Fock model JSON; default scalar S1, D1");
  conj_check->add_option("--target", target, "Target symbol")->required();
  conj_check->add_option("--xi", xi_text, "Candidate word (default: the target)");
  conj_check->add_option("--xi-scale", xi_scale, "Scalar multiplying the candidate")->capture_default_str();
  conj_check->add_option("--eta", eta_path, "CPMap JSON (default: identity)");
  conj_check->add_option("--ctx-left", ctx_left, "Extra left generators");
  conj_check->add_option("--ctx-right", ctx_right, "Extra right generators");
  conj_check->add_option("--max-n", max_n, "Longest test word")->check(CLI::Range(0, 8))->capture_default_str();
  conj_check->add_option("--max-n-coef", max_n_coef, "Longest test word with Lb/Rb insertions (-1: --max-n)");
  conj_check->add_option("--solve", solve_degree, "Least-squares solve over words of this degree instead of --xi");
  conj_check->callback([&] {
    action = [&] {
      auto model = load_model(model_path, cfg);
      const auto& sym = model->symbol(target);
      const CPMap eta = eta_path.empty() ? CPMap::identity(model->dim()) : cpmap_from_json(read_json(eta_path));
      PresenceContext ctx;
      for (const auto& s : ctx_left) ctx.left.push_back(Polynomial(parse_word(s)));
      for (const auto& s : ctx_right) ctx.right.push_back(Polynomial(parse_word(s)));
      const ConjCheckOptions opts{max_n, max_n_coef};
      ojson j = envelope("conj check");
      j["target"] = target;
      ConjugateCandidate xi;
      ConjResidual r;
      if (solve_degree >= 0) {
        const auto solved = solve_conjugate(Polynomial::sym(target), sym.side, eta, ctx, *model, solve_degree, opts);
        xi = solved.candidate;
        r = solved.residual;
        json terms = json::array();
        for (const auto& t : xi.vector.terms())
          terms.push_back({{"word", to_string(t.word)}, {"re", t.coef.real()}, {"im", t.coef.imag()}});
        j["solved"] = terms;
      } else {
        const Monomial w = parse_word(xi_text.empty() ? target : xi_text);
        xi = {cplx(xi_scale) * Polynomial(w), Polynomial::sym(target), sym.side, target};
        r = conj_residual(xi, eta, ctx, *model, opts);
      }
      j["side"] = std::string(1, side_char(sym.side));
      j["words"] = r.words;
      j["max_residual"] = r.max_residual;
      j["worst_word"] = r.worst_word;
      j["norm_squared"] = norm_squared(*model, xi.vector);
      j["pass"] = r.max_residual <= cfg.tolerance;
      emit(j);
      return r.max_residual <= cfg.tolerance ? 0 : 1;
    };
  });

  // fisher run
  auto* fisher = app.add_subcommand("fisher", "Fisher-information experiments");
  fisher->require_subcommand(1);
  std::string experiment;
  double lambda = 1.0;
  auto* fisher_run = fisher->add_subcommand("run", "Run an experiment");
  fisher_run->add_option("--experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember({"circular-min"}));
  fisher_run->add_option("--lambda", lambda, "Scale both sides by lambda")->capture_default_str();
  fisher_run->callback([&] {
    action = [&] {
      const auto r = fisher_minimization_experiment(lambda);
      ojson j = envelope("fisher run");
      j["experiment"] = experiment;
      j["lambda"] = r.lambda;
      j["lhs"] = r.lhs;
      j["rhs"] = r.rhs;
      j["rhs_scalar"] = r.rhs_scalar;
      j["ratio"] = r.ratio;
      j["ratio_scalar"] = r.ratio_scalar;
      j["max_residual"] = r.max_residual;
      j["cramer_rao"] = {{"product", r.cramer_rao_product}, {"bound", r.cramer_rao_bound}};
      j["pass"] = r.pass;
      emit(j);
      return r.pass ? 0 : 1;
    };
  });

  // entropy run
  auto* ent = app.add_subcommand("entropy", "Entropy experiments");
  ent->require_subcommand(1);
  EntropyOptions eopts{1e6, 4000, {}, {}, {}};
  auto* ent_run = ent->add_subcommand("run", "Run an experiment");
  ent_run->add_option("--experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember({"semicircular-max", "circular-pair"}));
  ent_run->add_option("--t-max", eopts.t_max, "Quadrature cutoff")->check(CLI::PositiveNumber)->capture_default_str();
  ent_run->add_option("--steps", eopts.steps, "Simpson intervals")->check(CLI::Range(2, 1000000))->capture_default_str();
  ent_run->callback([&] {
    action = [&] {
      const auto r = experiment == "semicircular-max" ? semicircular_entropy_experiment(eopts)
                                                      : circular_pair_entropy_experiment(eopts);
      ojson j = envelope("entropy run");
      j["experiment"] = experiment;
      j["lhs"] = r.lhs;
      j["rhs"] = r.rhs;
      j["ratio"] = r.rhs != 0.0 ? r.lhs / r.rhs : 0.0;
      j["expected"] = r.expected;
      j["bracket"] = r.bracket;
      j["max_integrand"] = r.max_integrand;
      j["max_residual"] = r.max_residual;
      j["pass"] = r.pass;
      emit(j);
      return r.pass ? 0 : 1;
    };
  });

  // verify all
  auto* verify = app.add_subcommand("verify", "Acceptance suite");
  verify->require_subcommand(1);
  int trials = 200;
  auto* verify_all = verify->add_subcommand("all", "Run every acceptance criterion");
  verify_all->add_option("--trials", trials, "Randomized cases per property")->check(CLI::Range(1, 100000))->capture_default_str();
  verify_all->callback([&] {
    action = [&] {
      const auto results = run_acceptance({cfg.seed, trials});
      bool ok = true;
      for (const auto& r : results) ok &= r.pass;
      if (cfg.format == "csv") {
        std::cout << "id,name,pass,detail\n";
        for (const auto& r : results)
          std::cout << r.id << ',' << csv_escape(r.name) << ',' << (r.pass ? "true" : "false") << ','
                    << csv_escape(r.detail) << '\n';
        return ok ? 0 : 1;
      }
      ojson j = envelope("verify all");
      j["seed"] = cfg.seed;
      j["trials"] = trials;
      j["criteria"] = json::array();
      for (const auto& r : results)
        j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
      j["pass"] = ok;
      emit(j);
      return ok ? 0 : 1;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action ? action() : 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    emit({{"schema", 1}, {"error", {{"kind", "input"}, {"message", e.what()}}}});
    return 2;
  } catch (const std::exception& e) {
    emit({{"schema", 1}, {"error", {{"kind", "computation"}, {"message", e.what()}}}});
    return 1;
  }
}
