// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <span>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "graphkd/config.hpp"
#include "graphkd/errors.hpp"
#include "graphkd/gradients.hpp"
#include "graphkd/graph.hpp"
#include "graphkd/losses.hpp"
#include "graphkd/rng.hpp"
#include "graphkd/serialize.hpp"
#include "graphkd/synth.hpp"
#include "graphkd/trainer.hpp"

namespace graphkd {
namespace {

namespace fs = std::filesystem;

// Arbitrary dotted config overrides ("--mining.T 0.5", "--weights.alpha=2")
// are pulled out of argv before CLI11 sees it, since they are not a fixed
// option set. Only the key part (before any '=') decides; values containing
// dots, like file paths, pass through untouched.
struct SplitArgs {
  std::vector<std::string> args;
  std::vector<std::pair<std::string, std::string>> overrides;
};

SplitArgs extract_overrides(int argc, const char* const* argv) {
  SplitArgs out;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--", 0) == 0) {
      const std::string body = arg.substr(2);
      const auto eq = body.find('=');
      const std::string key = eq == std::string::npos ? body : body.substr(0, eq);
      if (key.find('.') != std::string::npos) {
        if (eq != std::string::npos) {
          out.overrides.emplace_back(key, body.substr(eq + 1));
        } else if (i + 1 < argc) {
          out.overrides.emplace_back(key, argv[++i]);
        } else {
          throw ValidationError("missing value for override --" + key);
        }
        continue;
      }
    }
    out.args.push_back(arg);
  }
  return out;
}

// Shorthand flags shared by the subcommands; each maps onto a config path so
// the precedence story stays single-track: file, then dotted overrides, then
// these.
struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  int steps = 0;
  std::string out_dir;
  bool export_graphs = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* steps_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* export_opt = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_steps, bool with_export) {
  sub->add_option("-c,--config", o.config_path, "JSON config file (defaults when omitted)");
  o.seed_opt = sub->add_option("--seed", o.seed, "root seed, shorthand for --seed <n>");
  if (with_steps) {
    o.steps_opt = sub->add_option("--steps", o.steps, "shorthand for --train.steps <n>");
  }
  o.out_opt = sub->add_option("-o,--out", o.out_dir, "shorthand for --output.dir <dir>");
  if (with_export) {
    o.export_opt = sub->add_flag("--export-graphs", o.export_graphs,
                                 "dump probe-episode graphs after training");
  }
}

RunConfig resolve_config(const CommonOpts& o, const SplitArgs& split) {
  auto overrides = split.overrides;
  if (o.seed_opt != nullptr && o.seed_opt->count() > 0) {
    overrides.emplace_back("seed", std::to_string(o.seed));
  }
  if (o.steps_opt != nullptr && o.steps_opt->count() > 0) {
    overrides.emplace_back("train.steps", std::to_string(o.steps));
  }
  if (o.out_opt != nullptr && o.out_opt->count() > 0) {
    overrides.emplace_back("output.dir", o.out_dir);
  }
  if (o.export_opt != nullptr && o.export_opt->count() > 0) {
    overrides.emplace_back("output.export_graphs", o.export_graphs ? "true" : "false");
  }
  if (o.config_path.empty()) {
    return parse_config_text("", overrides);
  }
  return parse_config_file(o.config_path, overrides);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir), ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  }
}

std::vector<Vec> gather_teacher_logits(const std::vector<InstanceRecord>& records) {
  std::vector<Vec> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.teacher_logits);
  return out;
}

std::vector<int> gather_record_ids(const std::vector<InstanceRecord>& records) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.id);
  return out;
}

void export_probe_graphs(const RunConfig& cfg, const TeacherModel& teacher,
                         const StudentModel& student, bool with_episode) {
  // Probe episode: slot (0, 0) of the episode stream. Training steps are
  // 1-based, so this draw never overlaps the data the run trained on.
  const auto probe_seed = derive_seed(cfg.seed, kStreamEpisode, 0, 0);
  const EpisodeBatch batch = gen_episode(cfg.episode, teacher, probe_seed);
  const auto inputs = batch.inputs();
  const auto student_emb = student.forward(inputs).embeddings;

  const auto& t = cfg.train;
  const Graph g_t = build_graph(batch.records, t.mining_threshold, t.mining_enabled,
                                t.norm_epsilon);
  const Graph g_s = build_graph(batch.records, std::span<const Vec>(student_emb),
                                t.mining_threshold, t.mining_enabled, t.norm_epsilon);

  const fs::path dir(cfg.output.dir);
  write_text_file((dir / "graph_teacher.json").string(),
                  graph_dump_to_json(make_graph_dump(g_t, batch.records)));
  write_text_file((dir / "graph_student.json").string(),
                  graph_dump_to_json(make_graph_dump(g_s, batch.records)));
  if (with_episode) {
    write_text_file((dir / "episode.jsonl").string(), episode_to_jsonl(batch));
  }
  std::cout << "exported graphs for probe episode: " << batch.records.size() << " instances, "
            << g_t.nodes.fg_count() << " fg, " << g_t.nodes.bg_count() << " bg, "
            << g_t.edges.size() << " edge participants\n";
}

int run_distill(const RunConfig& cfg) {
  ensure_dir(cfg.output.dir);
  const fs::path dir(cfg.output.dir);
  write_text_file((dir / "config.json").string(), config_to_json(cfg));

  const std::string metrics_path = (dir / "metrics.jsonl").string();
  std::ofstream metrics(metrics_path, std::ios::binary);
  if (!metrics) {
    throw IoError("cannot open '" + metrics_path + "' for writing");
  }
  RunResult result = run_distillation(cfg.episode, cfg.train, [&](const StepMetrics& m) {
    metrics << metrics_to_json_line(m) << '\n';
  });
  metrics.close();
  if (!metrics) {
    throw IoError("failed writing '" + metrics_path + "'");
  }

  if (!result.metrics.empty()) {
    std::cout << metrics_to_json_line(result.metrics.back()) << "\n";
  }
  if (cfg.output.export_graphs) {
    export_probe_graphs(cfg, result.teacher, result.student, /*with_episode=*/false);
  }
  return kExitOk;
}

int run_ablate(const RunConfig& cfg) {
  ensure_dir(cfg.output.dir);
  const auto rows = run_ablation(cfg.episode, cfg.train);
  const std::string csv = ablation_to_csv(rows);
  write_text_file((fs::path(cfg.output.dir) / "ablation.csv").string(), csv);

  std::cout << csv;
  std::cout << std::scientific << std::setprecision(6);
  for (const auto& row : rows) {
    std::cout << "# combined " << row.name << " " << row.combined << "\n";
  }
  return kExitOk;
}

int run_gradcheck(const RunConfig& cfg) {
  const TeacherModel teacher = make_teacher(cfg.episode, derive_seed(cfg.seed, kStreamTeacher));
  const StudentModel student =
      StudentModel::random_init(cfg.episode.input_dim, cfg.train.student_hidden,
                                cfg.episode.embed_dim, cfg.episode.num_classes,
                                derive_seed(cfg.seed, kStreamStudent));
  const EpisodeBatch batch =
      gen_episode(cfg.episode, teacher, derive_seed(cfg.seed, kStreamGradcheck, 0, 0));

  const auto inputs = batch.inputs();
  const StudentForward fwd = student.forward(inputs);
  const auto teacher_logits = gather_teacher_logits(batch.records);
  const auto record_ids = gather_record_ids(batch.records);
  const auto& t = cfg.train;
  const Graph g_t = build_graph(batch.records, t.mining_threshold, t.mining_enabled,
                                t.norm_epsilon);

  const StudentOutputs shape{fwd.embeddings, fwd.cls_logits, fwd.reg_outputs};
  const Vec point = flatten_outputs(shape);

  const Graph g_s0 = build_graph(batch.records, std::span<const Vec>(fwd.embeddings),
                                 t.mining_threshold, t.mining_enabled, t.norm_epsilon);
  const GradBundle bundle =
      grad_total(g_t, g_s0, teacher_logits, fwd.cls_logits, batch.teacher_reg, fwd.reg_outputs,
                 t.weights, t.flags, t.norm_epsilon);
  const Vec analytic = flatten_grad_bundle(bundle, record_ids);

  const LossFn loss_fn = [&](std::span<const double> p) {
    const StudentOutputs cur = unflatten_outputs(p, shape);
    const Graph g_s = build_graph(batch.records, std::span<const Vec>(cur.embeddings),
                                  t.mining_threshold, t.mining_enabled, t.norm_epsilon);
    return total_distill_loss(g_t, g_s, teacher_logits, cur.cls_logits, batch.teacher_reg,
                              cur.reg_outputs, t.weights, t.flags)
        .total_distill;
  };

  const GradCheckReport report =
      finite_diff_check(loss_fn, point, analytic, cfg.gradcheck.step, cfg.gradcheck.tolerance);

  ensure_dir(cfg.output.dir);
  write_text_file((fs::path(cfg.output.dir) / "gradcheck.json").string(),
                  gradcheck_report_to_json(report));

  std::cout << std::scientific << std::setprecision(3);
  std::cout << "gradcheck " << (report.passed ? "PASS" : "FAIL")
            << " max_rel_error=" << report.max_rel_error << " tolerance=" << report.tolerance
            << " coords=" << point.size() << "\n";
  return report.passed ? kExitOk : kExitNumerical;
}

int run_export_graph(const RunConfig& cfg) {
  ensure_dir(cfg.output.dir);
  const TeacherModel teacher = make_teacher(cfg.episode, derive_seed(cfg.seed, kStreamTeacher));
  const StudentModel student =
      StudentModel::random_init(cfg.episode.input_dim, cfg.train.student_hidden,
                                cfg.episode.embed_dim, cfg.episode.num_classes,
                                derive_seed(cfg.seed, kStreamStudent));
  export_probe_graphs(cfg, teacher, student, /*with_episode=*/true);
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"structured instance-graph distillation on synthetic detection episodes"};
  app.require_subcommand(1);
  app.footer(
      "Any config key can be overridden with a dotted flag, e.g.\n"
      "  graphkd distill --mining.T 0.5 --weights.alpha 2.0 --train.steps 500\n"
      "Values use JSON syntax; bare strings are accepted for string keys.");

  CommonOpts distill_opts, ablate_opts, gradcheck_opts, export_opts;
  CLI::App* distill = app.add_subcommand("distill", "train a student against the frozen teacher");
  add_common(distill, distill_opts, /*with_steps=*/true, /*with_export=*/true);
  CLI::App* ablate =
      app.add_subcommand("ablate", "run the four-row term ladder and write a CSV");
  add_common(ablate, ablate_opts, /*with_steps=*/true, /*with_export=*/false);
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "compare analytic distillation gradients against central differences");
  add_common(gradcheck, gradcheck_opts, /*with_steps=*/false, /*with_export=*/false);
  CLI::App* export_graph = app.add_subcommand(
      "export-graph", "dump one probe episode and both instance graphs as JSON");
  add_common(export_graph, export_opts, /*with_steps=*/false, /*with_export=*/false);
  app.add_subcommand("print-defaults", "print the fully resolved default config as JSON");

  try {
    const SplitArgs split = extract_overrides(argc, argv);
    std::vector<const char*> ptrs;
    ptrs.reserve(split.args.size());
    for (const auto& a : split.args) ptrs.push_back(a.c_str());

    try {
      app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? kExitOk : kExitValidation;
    }

    if (app.got_subcommand("print-defaults")) {
      std::cout << config_to_json(default_config());
      return kExitOk;
    }
    if (app.got_subcommand(distill)) return run_distill(resolve_config(distill_opts, split));
    if (app.got_subcommand(ablate)) return run_ablate(resolve_config(ablate_opts, split));
    if (app.got_subcommand(gradcheck)) return run_gradcheck(resolve_config(gradcheck_opts, split));
    if (app.got_subcommand(export_graph)) {
      return run_export_graph(resolve_config(export_opts, split));
    }
    return kExitValidation;  // unreachable with require_subcommand(1)
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace graphkd
