#include "evtrust/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "evtrust/errors.hpp"
#include "evtrust/feedback.hpp"
#include "evtrust/numerics.hpp"
#include "evtrust/series_io.hpp"
#include "evtrust/simulation.hpp"
#include "evtrust/update.hpp"
#include "text_util.hpp"

namespace evtrust {

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string format = "csv";
  double tol = 1e-9;
};

Evidence parse_evidence(const std::string& text, std::string_view what) {
  const auto parts = detail::split(text, ',');
  if (parts.size() != 2) {
    throw ArgumentError(std::string(what) + " must be given as r,s (got '" + text + "')");
  }
  return {detail::parse_double(parts[0], what), detail::parse_double(parts[1], what)};
}

std::vector<double> parse_grid(const std::string& text, std::string_view what) {
  const auto parts = detail::split(text, ':');
  if (parts.size() != 3) {
    throw ArgumentError(std::string(what) + " must be given as lo:hi:step (got '" + text + "')");
  }
  return make_grid(detail::parse_double(parts[0], what), detail::parse_double(parts[1], what),
                   detail::parse_double(parts[2], what));
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ArgumentError("cannot write output file '" + path + "'");
  file << text;
  if (!file.flush()) throw ArgumentError("failed writing output file '" + path + "'");
}

HistoryMode parse_history_mode(const std::string& text, double beta, HistoryConvention convention) {
  std::string key;
  for (char ch : text) {
    if (ch == '-' || ch == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (key == "amazon") return HistoryMode::amazon();
  if (key == "fixedbeta" || key == "fixed") return HistoryMode::fixed_beta(beta);
  if (key == "trustinhistory" || key == "tih") return HistoryMode::trust_in_history(convention);
  throw ArgumentError("unknown history mode '" + text +
                      "' (expected amazon, fixed-beta or trust-in-history)");
}

HistoryConvention convention_of(bool printed) {
  return printed ? HistoryConvention::Printed : HistoryConvention::Prose;
}

ExperimentConfig make_config(const Globals& g, const std::string& method, double beta,
                             int timesteps, int tx, int horizon) {
  ExperimentConfig cfg;
  cfg.seed = g.seed;
  cfg.method = parse_update_method(method);
  cfg.beta = beta;
  cfg.timesteps = timesteps;
  cfg.tx_per_step = tx;
  cfg.horizon = horizon;
  cfg.validate();
  return cfg;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evidence-based trust: certainty, referral updates and simulations", "evtrust"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}, CLI::ignore_case))
      ->capture_default_str();
  app.add_option("--tol", g.tol, "Absolute tolerance for quadrature")->capture_default_str();

  // certainty
  auto* cmd_certainty = app.add_subcommand("certainty", "Certainty of evidence <r, s>");
  double cert_r = 0.0;
  double cert_s = 0.0;
  cmd_certainty->add_option("r", cert_r, "Positive evidence")->required();
  cmd_certainty->add_option("s", cert_s, "Negative evidence")->required();

  // accuracy
  auto* cmd_accuracy = app.add_subcommand("accuracy", "Accuracy of a report against an observation");
  std::string acc_method;
  std::string acc_observed;
  std::string acc_report;
  bool acc_integral = false;
  cmd_accuracy->add_option("--method", acc_method, "linear, max-certainty, sensitivity or average")
      ->required();
  cmd_accuracy->add_option("--observed", acc_observed, "Observed evidence r,s")->required();
  cmd_accuracy->add_option("--report", acc_report, "Reported evidence r,s")->required();
  cmd_accuracy->add_flag("--integral", acc_integral,
                         "Average only: evaluate the defining integral by quadrature");

  // update
  auto* cmd_update = app.add_subcommand("update", "One revision of trust in a referrer");
  std::string upd_method;
  double upd_beta = 0.0;
  std::string upd_observed;
  std::string upd_report;
  std::string upd_prior = "1,1";
  std::string upd_history = "0.9,0.1";
  cmd_update->add_option("--method", upd_method, "LinearWS, Josang, MaxCertainty, Sensitivity, "
                                                 "AverageBeta or AverageAlpha")
      ->required();
  cmd_update->add_option("--beta", upd_beta, "Forgetting rate")->capture_default_str();
  cmd_update->add_option("--observed", upd_observed, "Observed evidence r,s")->required();
  cmd_update->add_option("--report", upd_report,
                         "Reported evidence r,s (AverageAlpha: carried evidence)");
  cmd_update->add_option("--prior", upd_prior, "Current trust in the referrer r,s")
      ->capture_default_str();
  cmd_update->add_option("--history", upd_history, "AverageAlpha: trust in history r,s")
      ->capture_default_str();

  // simulate
  auto* cmd_sim = app.add_subcommand("simulate", "Run one experiment and write its series");
  std::string sim_experiment = "referrer";
  std::string sim_profile = "probability:0.9";
  std::string sim_referrer = "truthful";
  std::string sim_method = "AverageBeta";
  std::string sim_mode = "trust-in-history";
  double sim_beta = 0.2;
  int sim_timesteps = 100;
  int sim_tx = 50;
  int sim_horizon = 0;
  std::string sim_out;
  bool sim_printed = false;
  cmd_sim->add_option("--experiment", sim_experiment, "referrer, combine or history")
      ->check(CLI::IsMember({"referrer", "combine", "history"}))
      ->capture_default_str();
  cmd_sim->add_option("--profile", sim_profile, "Provider behavior profile")->capture_default_str();
  cmd_sim->add_option("--referrer", sim_referrer, "Referrer profile (referrer experiment)")
      ->capture_default_str();
  cmd_sim->add_option("--method", sim_method, "Referrer update method")->capture_default_str();
  cmd_sim->add_option("--mode", sim_mode, "History mode: amazon, fixed-beta or trust-in-history")
      ->capture_default_str();
  cmd_sim->add_option("--beta", sim_beta, "Forgetting rate")->capture_default_str();
  cmd_sim->add_option("--timesteps", sim_timesteps, "Number of timesteps")->capture_default_str();
  cmd_sim->add_option("--tx", sim_tx, "Transactions per timestep")->capture_default_str();
  cmd_sim->add_option("--horizon", sim_horizon, "Damping horizon (0: timesteps)")
      ->capture_default_str();
  cmd_sim->add_option("--out", sim_out, "Output file (default: stdout)");
  cmd_sim->add_flag("--printed-history", sim_printed,
                    "Trust in history credits inaccuracy (transposed update, for comparison)");

  // sweep
  auto* cmd_sweep = app.add_subcommand("sweep", "Prediction error over a grid of beta values");
  std::string sw_experiment = "history";
  std::string sw_grid = "0:1:0.1";
  std::vector<std::string> sw_profiles;
  std::string sw_method = "AverageBeta";
  int sw_seeds = 10;
  int sw_timesteps = 100;
  int sw_tx = 50;
  int sw_horizon = 0;
  std::string sw_out;
  bool sw_printed = false;
  cmd_sweep->add_option("--experiment", sw_experiment, "history or referrer")
      ->check(CLI::IsMember({"history", "referrer"}))
      ->capture_default_str();
  cmd_sweep->add_option("--beta-grid", sw_grid, "lo:hi:step")->capture_default_str();
  cmd_sweep->add_option("--profile", sw_profiles, "Behavior profile (repeatable)");
  cmd_sweep->add_option("--method", sw_method, "Referrer update method (referrer experiment)")
      ->capture_default_str();
  cmd_sweep->add_option("--seeds", sw_seeds, "Runs per grid point, seeds seed..seed+n-1")
      ->capture_default_str();
  cmd_sweep->add_option("--timesteps", sw_timesteps, "Number of timesteps")->capture_default_str();
  cmd_sweep->add_option("--tx", sw_tx, "Transactions per timestep")->capture_default_str();
  cmd_sweep->add_option("--horizon", sw_horizon, "Damping horizon (0: timesteps)")
      ->capture_default_str();
  cmd_sweep->add_option("--out", sw_out, "Output file (default: stdout)");
  cmd_sweep->add_flag("--printed-history", sw_printed,
                      "Trust in history credits inaccuracy (transposed update, for comparison)");

  // amazon
  auto* cmd_amazon = app.add_subcommand("amazon", "Predict seller ratings from earlier ratings");
  std::string am_input;
  std::string am_grid = "0:1:0.1";
  std::string am_out;
  bool am_pooled = false;
  cmd_amazon->add_option("--input", am_input, "CSV with header seller_id,t,rating")->required();
  cmd_amazon->add_option("--lambda-grid", am_grid, "lo:hi:step for geometric weights")
      ->capture_default_str();
  cmd_amazon->add_flag("--pooled", am_pooled, "One row per config, pooled over all sellers");
  cmd_amazon->add_option("--out", am_out, "Output file (default: stdout)");

  // gen-feedback
  auto* cmd_gen = app.add_subcommand("gen-feedback", "Write a synthetic ratings CSV");
  std::string gen_profile = "probability:0.9";
  int gen_sellers = 5;
  int gen_ratings = 40;
  std::string gen_out;
  cmd_gen->add_option("--profile", gen_profile, "Behavior profile driving the ratings")
      ->capture_default_str();
  cmd_gen->add_option("--sellers", gen_sellers, "Number of sellers")->capture_default_str();
  cmd_gen->add_option("--ratings", gen_ratings, "Ratings per seller")->capture_default_str();
  cmd_gen->add_option("--out", gen_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    const OutputFormat format = parse_output_format(g.format);
    Tolerance tol;
    tol.abs_tol = g.tol;
    tol.validate();

    if (*cmd_certainty) {
      const Evidence e(cert_r, cert_s);
      const double c = certainty(e);
      if (format == OutputFormat::Json) {
        out << "{\"r\":" << format_number(e.r()) << ",\"s\":" << format_number(e.s())
            << ",\"certainty\":" << format_number(c) << "}\n";
      } else {
        out << format_number(c) << "\n";
      }
    } else if (*cmd_accuracy) {
      const AccuracyMethod method = parse_accuracy_method(acc_method);
      const Evidence observed = parse_evidence(acc_observed, "--observed");
      const Evidence report = parse_evidence(acc_report, "--report");
      if (acc_integral && method != AccuracyMethod::Average) {
        throw ArgumentError("--integral applies to the average measure only");
      }
      const double alpha = expected_quality(observed);
      const double alpha_prime = expected_quality(report);
      double q = 0.0;
      switch (method) {
        case AccuracyMethod::Linear: q = accuracy_linear(alpha, alpha_prime); break;
        case AccuracyMethod::MaxCertainty: q = accuracy_max_certainty(observed, alpha_prime); break;
        case AccuracyMethod::Sensitivity: q = accuracy_sensitivity(alpha, report); break;
        case AccuracyMethod::Average:
          q = acc_integral ? accuracy_average_integral(alpha, report, tol)
                           : accuracy_average(alpha, report);
          break;
      }
      if (format == OutputFormat::Json) {
        out << "{\"method\":\"" << to_string(method) << "\",\"q\":" << format_number(q) << "}\n";
      } else {
        out << format_number(q) << "\n";
      }
    } else if (*cmd_update) {
      const UpdateMethod method = parse_update_method(upd_method);
      const Evidence observed = parse_evidence(upd_observed, "--observed");
      if (method == UpdateMethod::AverageAlpha) {
        HistoryState state;
        state.carried = upd_report.empty() ? Evidence{} : parse_evidence(upd_report, "--report");
        state.history_trust = parse_evidence(upd_history, "--history");
        const HistoryStep step = history_update(state, observed);
        Table t({"r", "s", "history_r", "history_s", "discount"});
        t.add_row({step.combined.r(), step.combined.s(), step.next.history_trust.r(),
                   step.next.history_trust.s(), step.discount});
        out << t.render(format);
      } else {
        if (upd_report.empty()) throw ArgumentError("--report is required for " + upd_method);
        const Evidence updated =
            update_referrer(UpdateConfig{method, upd_beta}, observed,
                            parse_evidence(upd_report, "--report"), parse_evidence(upd_prior, "--prior"));
        Table t({"r", "s"});
        t.add_row({updated.r(), updated.s()});
        out << t.render(format);
      }
    } else if (*cmd_sim) {
      const ExperimentConfig cfg =
          make_config(g, sim_method, sim_beta, sim_timesteps, sim_tx, sim_horizon);
      std::vector<TimestepRecord> series;
      if (sim_experiment == "referrer") {
        series = run_referrer_experiment(cfg, parse_behavior_profile(sim_profile),
                                         parse_referrer_profile(sim_referrer));
      } else if (sim_experiment == "combine") {
        series = run_combination_experiment(cfg);
      } else {
        series = run_history_experiment(cfg, parse_behavior_profile(sim_profile),
                                        parse_history_mode(sim_mode, sim_beta, convention_of(sim_printed)));
      }
      emit(series_table(series).render(format), sim_out, out);
    } else if (*cmd_sweep) {
      const ExperimentConfig cfg = make_config(g, sw_method, 0.0, sw_timesteps, sw_tx, sw_horizon);
      if (sw_profiles.empty()) sw_profiles = {"probability:0.9"};
      std::vector<BehaviorProfile> profiles;
      for (const auto& p : sw_profiles) profiles.push_back(parse_behavior_profile(p));
      const std::vector<double> betas = parse_grid(sw_grid, "--beta-grid");
      if (sw_experiment == "history") {
        Table t({"profile", "beta", "fixed_beta_error", "amazon_error", "trust_in_history_error"});
        for (const auto& r : sweep_history(cfg, profiles, betas, sw_seeds, convention_of(sw_printed))) {
          t.add_row({r.profile, r.beta, r.fixed_beta_error, r.amazon_error, r.trust_in_history_error});
        }
        emit(t.render(format), sw_out, out);
      } else {
        Table t({"profile", "method", "beta", "error", "final_trust"});
        for (const auto& r : sweep_referrer(cfg, profiles, betas, sw_seeds)) {
          t.add_row({r.profile, r.method, r.beta, r.error, r.final_trust});
        }
        emit(t.render(format), sw_out, out);
      }
    } else if (*cmd_amazon) {
      const auto records = load_feedback_csv(am_input);
      std::vector<AmazonConfig> configs = {AmazonConfig::unweighted()};
      for (double lambda : parse_grid(am_grid, "--lambda-grid")) {
        configs.push_back(AmazonConfig::geometric(lambda));
      }
      configs.push_back(AmazonConfig::trust_in_history());

      Table t({"seller_id", "mode", "lambda", "error", "error_5pt", "predictions"});
      auto add = [&](const AmazonResult& r) {
        const bool has_lambda = r.config.mode == AmazonConfig::Mode::GeometricWeights;
        t.add_row({r.seller_id, to_string(r.config.mode),
                   has_lambda ? Table::Cell(r.config.lambda) : Table::Cell(std::string()), r.error,
                   r.error_scale5, static_cast<long long>(r.predictions)});
      };
      if (am_pooled) {
        for (const auto& r : pooled_errors(records, configs)) add(r);
      } else {
        const AmazonReport report = run_amazon_experiment(records, configs);
        for (const auto& s : report.skipped) {
          err << "warning: seller '" << s << "' has fewer than two ratings; skipped\n";
        }
        for (const auto& r : report.rows) add(r);
      }
      emit(t.render(format), am_out, out);
    } else if (*cmd_gen) {
      const auto records =
          generate_feedback(parse_behavior_profile(gen_profile), gen_sellers, gen_ratings, g.seed);
      emit(format_feedback_csv(records), gen_out, out);
    }
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (best estimate " << format_number(e.best_estimate()) << ")\n";
    return kExitConvergence;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace evtrust
