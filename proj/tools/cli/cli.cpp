#include "cli.hpp"

#include "iclef/annotation.hpp"
#include "iclef/annotation_server.hpp"
#include "iclef/authorship.hpp"
#include "iclef/critic.hpp"
#include "iclef/dataset.hpp"
#include "iclef/error.hpp"
#include "iclef/evaluation.hpp"
#include "iclef/feedback.hpp"
#include "iclef/gateway.hpp"
#include "iclef/rng.hpp"
#include "iclef/sweep.hpp"
#include "iclef/teacher.hpp"
#include "iclef/text.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

namespace iclef::cli {

namespace fs = std::filesystem;

namespace {

struct GatewayFlags {
  std::string mode = "replay";
  std::string cache = ".iclef-cache";
  std::string api_base;
  std::string fixture_responses;
  std::size_t max_inflight = 4;
  int max_attempts = 5;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool dry_run = false;
};

void add_gateway_flags(CLI::App* sub, GatewayFlags& g) {
  sub->add_option("--mode", g.mode, "live | record | replay")->check(CLI::IsMember({"live", "record", "replay"}));
  sub->add_option("--cache", g.cache, "replay cache directory");
  sub->add_option("--api-base", g.api_base, "chat endpoint base URL (default: $ICLEF_API_BASE)");
  sub->add_option("--fixture-responses", g.fixture_responses,
                  "JSONL of {query, response} served instead of a live endpoint");
  sub->add_option("--max-inflight", g.max_inflight, "concurrent endpoint requests");
  sub->add_option("--max-attempts", g.max_attempts, "attempts per request before giving up");
}

std::unique_ptr<Gateway> make_gateway(const GatewayFlags& g) {
  GatewayOptions opts;
  opts.mode = parse_mode(g.mode);
  opts.max_inflight = g.max_inflight;
  opts.retry.max_attempts = g.max_attempts;
  std::shared_ptr<ReplayCache> cache;
  std::shared_ptr<ChatTransport> transport;
  if (opts.mode == GatewayMode::Replay) {
    if (!g.api_base.empty() || !g.fixture_responses.empty()) {
      throw UsageError("replay mode does not talk to endpoints; drop --api-base/--fixture-responses");
    }
  } else if (!g.fixture_responses.empty()) {
    transport = std::make_shared<TableTransport>(g.fixture_responses);
  } else if (!g.api_base.empty()) {
    const char* key = std::getenv("ICLEF_API_KEY");
    transport = std::make_shared<HttpChatTransport>(g.api_base, key ? key : "");
  } else {
    transport = HttpChatTransport::from_environment();
  }
  if (opts.mode != GatewayMode::Live) cache = std::make_shared<ReplayCache>(g.cache);
  return std::make_unique<Gateway>(opts, transport, cache);
}

// Options of a subcommand as {long name: value}, in declaration order.
ordered_json option_snapshot(const CLI::App* sub) {
  ordered_json opts = ordered_json::object();
  for (const CLI::Option* o : sub->get_options()) {
    auto name = o->get_single_name();
    if (name == "help" || name == "config" || name == "dry-run" || name.empty()) continue;
    auto results = o->results();
    if (results.empty()) {
      auto def = o->get_default_str();
      if (o->get_type_size() == 0) {
        opts[name] = false;
      } else if (def.empty()) {
        opts[name] = nullptr;
      } else {
        opts[name] = def;
      }
    } else if (o->get_type_size() == 0) {
      opts[name] = true;
    } else if (results.size() == 1) {
      opts[name] = results.front();
    } else {
      opts[name] = results;
    }
  }
  return opts;
}

void write_snapshot(const CLI::App* sub, const fs::path& out) {
  ordered_json snap;
  snap["command"] = sub->get_name();
  snap["options"] = option_snapshot(sub);
  write_file(out.string() + ".config.json", snap.dump(2) + "\n");
}

bool print_plan(Context& ctx, const CLI::App* sub, const std::vector<std::string>& writes) {
  if (!ctx.dry_run) return false;
  ordered_json plan;
  plan["command"] = sub->get_name();
  plan["dry_run"] = true;
  plan["options"] = option_snapshot(sub);
  plan["would_write"] = writes;
  ctx.out << plan.dump(2) << "\n";
  return true;
}

fs::path sibling(const fs::path& p, std::string_view suffix) { return fs::path(p.string() + std::string(suffix)); }

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explainable style-transfer dataset toolkit"};
  app.name("iclef");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style configuration file; flags override it");
  app.option_defaults()->always_capture_default();

  Context ctx{out, err};
  std::function<void()> action;
  auto add_dry_run = [&](CLI::App* sub) { sub->add_flag("--dry-run", ctx.dry_run, "print the plan and exit"); };

  // generate ---------------------------------------------------------------
  GatewayFlags gen_gw;
  GenerationJob gen_job;
  std::string gen_task = "formality";
  std::size_t gen_stop_after = 0;
  auto* gen = app.add_subcommand("generate", "run the teacher over a corpus");
  gen->add_option("--task", gen_task, "formality | bias")->check(CLI::IsMember({"formality", "bias"}));
  gen->add_option("--in", gen_job.input, "corpus: one sentence per line, or source<TAB>reference")->required();
  gen->add_option("--out", gen_job.output, "output records (JSONL)")->required();
  gen->add_option("--checkpoint", gen_job.checkpoint, "checkpoint file (default <out>.checkpoint.json)");
  gen->add_option("--quarantine", gen_job.quarantine, "quarantine file (default <out>.quarantine.jsonl)");
  gen->add_option("--id-prefix", gen_job.id_prefix, "record id prefix (default: task name)");
  gen->add_option("--batch-size", gen_job.batch_size);
  gen->add_option("--workers", gen_job.workers);
  gen->add_option("--stop-after", gen_stop_after, "stop after this many new inputs (0: run to the end)");
  add_gateway_flags(gen, gen_gw);
  add_dry_run(gen);
  gen->callback([&] {
    action = [&] {
      gen_job.task = parse_task(gen_task);
      if (gen_stop_after > 0) gen_job.stop_after = gen_stop_after;
      if (print_plan(ctx, gen, {gen_job.output.string(), sibling(gen_job.output, ".config.json").string()})) return;
      auto gateway = make_gateway(gen_gw);
      TeacherPipeline teacher(*gateway);
      ensure_parent(gen_job.output);
      write_snapshot(gen, gen_job.output);
      auto s = run_generation(gen_job, teacher);
      ordered_json j{{"inputs", s.inputs},       {"resumed", s.resumed},   {"processed", s.processed},
                     {"emitted", s.emitted},     {"quarantined", s.quarantined}};
      out << j.dump() << "\n";
    };
  });

  // critique ---------------------------------------------------------------
  GatewayFlags crit_gw;
  CritiqueJob crit_job;
  std::string crit_task = "formality";
  auto* crit = app.add_subcommand("critique", "apply the feedback-instantiated critic to records");
  crit->add_option("--task", crit_task, "formality | bias")->check(CLI::IsMember({"formality", "bias"}));
  crit->add_option("--in", crit_job.input, "records (JSONL)")->required();
  crit->add_option("--out", crit_job.output, "critiqued records (JSONL)")->required();
  crit->add_option("--feedback", crit_job.feedback, "expert feedback store (JSONL)")->required();
  crit->add_option("--k", crit_job.k, "feedback shots in the critic prompt");
  crit->add_option("--seed", crit_job.seed, "shot selection seed");
  crit->add_option("--workers", crit_job.workers);
  crit->add_option("--quarantine", crit_job.quarantine, "quarantine file (default <out>.quarantine.jsonl)");
  crit->add_flag("--critique-formal", crit_job.critique_formal, "also critique formal attributes");
  add_gateway_flags(crit, crit_gw);
  add_dry_run(crit);
  crit->callback([&] {
    action = [&] {
      crit_job.task = parse_task(crit_task);
      if (print_plan(ctx, crit, {crit_job.output.string(), sibling(crit_job.output, ".summary.json").string()})) return;
      auto gateway = make_gateway(crit_gw);
      TeacherPipeline teacher(*gateway);
      GatewayCritic critic(*gateway);
      ensure_parent(crit_job.output);
      write_snapshot(crit, crit_job.output);
      auto s = run_critique_pass(crit_job, critic, &teacher);
      auto j = to_json(s);
      write_file(sibling(crit_job.output, ".summary.json"), j.dump(2) + "\n");
      out << j.dump() << "\n";
    };
  });

  // split --------------------------------------------------------------------
  fs::path split_in, split_train_out, split_test_out;
  SplitSpec split_spec;
  auto* spl = app.add_subcommand("split", "seeded train/test split");
  spl->add_option("--in", split_in, "records (JSONL)")->required();
  spl->add_option("--train", split_spec.train_count, "train size")->required();
  spl->add_option("--test", split_spec.test_count, "test size")->required();
  spl->add_option("--seed", split_spec.seed);
  spl->add_option("--train-out", split_train_out, "default <in>.train.jsonl");
  spl->add_option("--test-out", split_test_out, "default <in>.test.jsonl");
  add_dry_run(spl);
  spl->callback([&] {
    action = [&] {
      auto stem = split_in.parent_path() / split_in.stem();
      if (split_train_out.empty()) split_train_out = sibling(stem, ".train.jsonl");
      if (split_test_out.empty()) split_test_out = sibling(stem, ".test.jsonl");
      if (print_plan(ctx, spl, {split_train_out.string(), split_test_out.string()})) return;
      auto parts = split(read_records(split_in), split_spec);
      ensure_parent(split_train_out);
      ensure_parent(split_test_out);
      write_records(split_train_out, parts.train);
      write_records(split_test_out, parts.test);
      write_snapshot(spl, split_train_out);
      out << ordered_json{{"train", parts.train.size()}, {"test", parts.test.size()}}.dump() << "\n";
    };
  });

  // export -------------------------------------------------------------------
  fs::path exp_in, exp_out;
  std::string exp_direction = "i2f";
  auto* exp = app.add_subcommand("export", "instruction-format export (JSON array)");
  exp->add_option("--in", exp_in, "records (JSONL)")->required();
  exp->add_option("--out", exp_out, "output JSON array")->required();
  exp->add_option("--direction", exp_direction, "i2f | f2i | bias | multi")
      ->check(CLI::IsMember({"i2f", "f2i", "bias", "multi"}));
  add_dry_run(exp);
  exp->callback([&] {
    action = [&] {
      if (print_plan(ctx, exp, {exp_out.string()})) return;
      auto rows = export_instructions(read_records(exp_in), parse_direction(exp_direction));
      ensure_parent(exp_out);
      write_file(exp_out, to_json(rows).dump(2) + "\n");
      write_snapshot(exp, exp_out);
      out << ordered_json{{"rows", rows.size()}}.dump() << "\n";
    };
  });

  // eval ---------------------------------------------------------------------
  fs::path ev_outputs, ev_test, ev_out;
  std::string ev_direction = "i2f", ev_scorer = "stub";
  auto* ev = app.add_subcommand("eval", "score model outputs against a test set");
  ev->add_option("--direction", ev_direction, "i2f | f2i | bias")->check(CLI::IsMember({"i2f", "f2i", "bias"}));
  ev->add_option("--outputs", ev_outputs, "model outputs, JSONL {id, output}")->required();
  ev->add_option("--test", ev_test, "test records (JSONL)")->required();
  ev->add_option("--scorer", ev_scorer, "scorer base URL, or 'stub'");
  ev->add_option("--out", ev_out, "report JSON; the per-record CSV goes to <out>.csv")->required();
  add_dry_run(ev);
  ev->callback([&] {
    action = [&] {
      if (print_plan(ctx, ev, {ev_out.string(), sibling(ev_out, ".csv").string()})) return;
      std::unique_ptr<Scorer> scorer;
      if (ev_scorer == "stub") {
        scorer = std::make_unique<StubScorer>();
      } else {
        scorer = std::make_unique<HttpScorer>(ev_scorer);
      }
      auto report = evaluate_run(read_model_outputs(ev_outputs), read_records(ev_test), parse_direction(ev_direction),
                                 *scorer);
      ensure_parent(ev_out);
      auto j = to_json(report);
      write_file(ev_out, j.dump(2) + "\n");
      write_file(sibling(ev_out, ".csv"), per_record_csv(report));
      write_snapshot(ev, ev_out);
      out << j["metrics"].dump() << "\n";
    };
  });

  // authorship ---------------------------------------------------------------
  GatewayFlags au_gw;
  fs::path au_pairs, au_out;
  std::string au_explainer;
  auto* au = app.add_subcommand("authorship", "attribute-overlap authorship verification");
  au->add_option("--pairs", au_pairs, "JSONL {pair_id, text_a, text_b, same_author}")->required();
  au->add_option("--explainer", au_explainer, "'endpoint', or a JSONL fixture of {sentence, explanation}")->required();
  au->add_option("--out", au_out, "pair scores CSV; the summary goes to <out>.summary.json")->required();
  add_gateway_flags(au, au_gw);
  add_dry_run(au);
  au->callback([&] {
    action = [&] {
      if (print_plan(ctx, au, {au_out.string(), sibling(au_out, ".summary.json").string()})) return;
      std::unique_ptr<Gateway> gateway;
      std::unique_ptr<Explainer> explainer;
      if (au_explainer == "endpoint") {
        gateway = make_gateway(au_gw);
        explainer = std::make_unique<GatewayExplainer>(*gateway);
      } else {
        explainer = std::make_unique<FixtureExplainer>(fs::path(au_explainer));
      }
      auto result = score_pairs(read_pairs(au_pairs), *explainer);
      ensure_parent(au_out);
      write_file(au_out, pair_scores_csv(result));
      auto j = to_json(result);
      write_file(sibling(au_out, ".summary.json"), j.dump(2) + "\n");
      write_snapshot(au, au_out);
      out << j.dump() << "\n";
    };
  });

  // stats --------------------------------------------------------------------
  fs::path st_in, st_out;
  std::size_t st_top = 50;
  auto* st = app.add_subcommand("stats", "attribute frequencies and bias class proportions");
  st->add_option("--in", st_in, "records (JSONL)")->required();
  st->add_option("--out", st_out, "output prefix: <out>.attributes.csv, <out>.classes.csv, <out>.json")->required();
  st->add_option("--top-n", st_top, "attributes to list");
  add_dry_run(st);
  st->callback([&] {
    action = [&] {
      std::vector<std::string> writes = {sibling(st_out, ".attributes.csv").string(),
                                         sibling(st_out, ".classes.csv").string(), sibling(st_out, ".json").string()};
      if (print_plan(ctx, st, writes)) return;
      auto s = compute_stats(read_records(st_in), st_top);
      ensure_parent(st_out);
      write_file(writes[0], attribute_counts_csv(s));
      write_file(writes[1], class_percentages_csv(s));
      write_file(writes[2], to_json(s).dump(2) + "\n");
      write_snapshot(st, st_out);
      out << ordered_json{{"records", s.records}, {"attributes", s.attribute_counts.size()}}.dump() << "\n";
    };
  });

  // sweep --------------------------------------------------------------------
  GatewayFlags sw_gw;
  fs::path sw_feedback, sw_eval, sw_out;
  std::string sw_task = "formality", sw_critic = "gateway";
  std::vector<std::size_t> sw_ks = {1, 10, 35};
  std::size_t sw_trials = 1, sw_eval_size = 15;
  std::uint64_t sw_seed = 0;
  auto* sw = app.add_subcommand("sweep", "critic correctness against the number of feedback shots");
  sw->add_option("--task", sw_task, "formality | bias")->check(CLI::IsMember({"formality", "bias"}));
  sw->add_option("--feedback", sw_feedback, "expert feedback store (JSONL)")->required();
  sw->add_option("--eval", sw_eval, "held-out feedback with gold verdicts (default: sampled from the store)");
  sw->add_option("--eval-size", sw_eval_size, "instances held out when --eval is absent");
  sw->add_option("--ks", sw_ks, "shot counts")->delimiter(',');
  sw->add_option("--trials", sw_trials);
  sw->add_option("--seed", sw_seed);
  sw->add_option("--critic", sw_critic, "'gateway' or 'simulated:<accuracy>'");
  sw->add_option("--out", sw_out, "sweep report JSON")->required();
  add_gateway_flags(sw, sw_gw);
  add_dry_run(sw);
  sw->callback([&] {
    action = [&] {
      if (print_plan(ctx, sw, {sw_out.string()})) return;
      const Task task = parse_task(sw_task);
      auto store = read_feedback(sw_feedback);
      std::vector<ExpertFeedback> eval_set;
      if (!sw_eval.empty()) {
        eval_set = read_feedback(sw_eval);
      } else {
        std::vector<ExpertFeedback> same_task;
        for (const auto& f : store) {
          if (f.task == task) same_task.push_back(f);
        }
        if (sw_eval_size > same_task.size()) throw InsufficientFeedback("eval size exceeds the feedback store");
        Rng rng(sw_seed);
        for (auto i : sample_indices(same_task.size(), sw_eval_size, rng)) eval_set.push_back(same_task[i]);
      }
      std::unique_ptr<Gateway> gateway;
      std::unique_ptr<Critic> critic;
      if (sw_critic.starts_with("simulated:")) {
        char* end = nullptr;
        const std::string p = sw_critic.substr(10);
        double accuracy = std::strtod(p.c_str(), &end);
        if (end == p.c_str() || *end != '\0' || accuracy < 0.0 || accuracy > 1.0) {
          throw UsageError("--critic simulated:<p> needs p in [0, 1]");
        }
        critic = std::make_unique<SimulatedCritic>(accuracy, eval_set, sw_seed);
      } else if (sw_critic == "gateway") {
        gateway = make_gateway(sw_gw);
        critic = std::make_unique<GatewayCritic>(*gateway);
      } else {
        throw UsageError("unknown critic '" + sw_critic + "'");
      }
      SweepOptions opts{sw_ks, sw_trials, sw_seed};
      auto rows = sweep_feedback_counts(store, eval_set, task, opts, *critic);
      ordered_json j;
      j["task"] = task_name(task);
      j["eval_instances"] = eval_set.size();
      j["rows"] = to_json(rows);
      ensure_parent(sw_out);
      write_file(sw_out, j.dump(2) + "\n");
      write_snapshot(sw, sw_out);
      out << j["rows"].dump() << "\n";
    };
  });

  // serve --------------------------------------------------------------------
  AnnotationServerOptions srv_opts;
  fs::path srv_store;
  auto* srv = app.add_subcommand("serve", "annotation REST service");
  srv->add_option("--store", srv_store, "annotation store directory")->required();
  srv->add_option("--port", srv_opts.port);
  srv->add_option("--host", srv_opts.host);
  srv->add_option("--token", srv_opts.token, "shared token (default: $ICLEF_ANNOTATION_TOKEN)");
  srv->add_option("--sweep-report", srv_opts.sweep_report, "JSON served at /reports/sweep");
  srv->add_flag("--dispreferred-as-unacceptable", srv_opts.dispreferred_as_unacceptable);
  add_dry_run(srv);
  srv->callback([&] {
    action = [&] {
      if (srv_opts.token.empty()) {
        if (const char* t = std::getenv("ICLEF_ANNOTATION_TOKEN")) srv_opts.token = t;
      }
      if (print_plan(ctx, srv, {(srv_store / "judgments.jsonl").string(), (srv_store / "feedback.jsonl").string()})) {
        return;
      }
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);
      AnnotationStore store(srv_store);
      AnnotationServer server(store, srv_opts);
      int port = server.start();
      out << ordered_json{{"listening", srv_opts.host + ":" + std::to_string(port)}}.dump() << std::endl;
      int sig = 0;
      sigwait(&signals, &sig);
      server.stop();
    };
  });

  // enqueue ------------------------------------------------------------------
  fs::path enq_in, enq_store;
  std::size_t enq_n = 50, enq_quota = 1;
  std::uint64_t enq_seed = 0;
  std::string enq_kind = "feedback";
  auto* enq = app.add_subcommand("enqueue", "sample records into annotation tasks");
  enq->add_option("--in", enq_in, "records (JSONL)")->required();
  enq->add_option("--store", enq_store, "annotation store directory")->required();
  enq->add_option("--n", enq_n, "tasks to create");
  enq->add_option("--kind", enq_kind, "feedback | preference | acceptability")
      ->check(CLI::IsMember({"feedback", "preference", "acceptability"}));
  enq->add_option("--seed", enq_seed);
  enq->add_option("--quota", enq_quota, "annotators per task");
  add_dry_run(enq);
  enq->callback([&] {
    action = [&] {
      if (print_plan(ctx, enq, {(enq_store / "tasks.jsonl").string()})) return;
      AnnotationStore store(enq_store);
      auto tasks = enqueue_sample(read_records(enq_in), enq_n, parse_task_kind(enq_kind), enq_seed, enq_quota,
                                  store.task_count() + 1);
      store.add_tasks(tasks);
      out << ordered_json{{"enqueued", tasks.size()}, {"total_tasks", store.task_count()}}.dump() << "\n";
    };
  });

  auto fail = [&](const char* kind, const std::string& message, int code) {
    err << ordered_json{{"error", kind}, {"message", message}}.dump() << "\n";
    return code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    return fail("UsageError", e.what(), 2);
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), dynamic_cast<const UsageError*>(&e) ? 2 : 1);
  }

  try {
    if (action) action();
    return 0;
  } catch (const UsageError& e) {
    return fail(e.kind(), e.what(), 2);
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("Error", e.what(), 1);
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace iclef::cli
