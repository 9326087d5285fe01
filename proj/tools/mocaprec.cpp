#include "mocaprec/config.hpp"
#include "mocaprec/csv.hpp"
#include "mocaprec/error.hpp"
#include "mocaprec/model_io.hpp"
#include "mocaprec/pipeline.hpp"
#include "mocaprec/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitPipeline = 4;

int exit_code_for(const mocaprec::Error& e) {
  switch (e.code()) {
    case mocaprec::Err::IoError:
    case mocaprec::Err::MissingFile:
      return kExitIo;
    default:
      return kExitPipeline;
  }
}

struct SynthArgs {
  std::string out_dir;
  mocaprec::SynthSpec spec;
  int threads = 0;
};

struct TrainArgs {
  std::string manifest;
  std::string config;
  std::string model_out;
  std::string leaderboard_out;
  std::string selection_out;
  int threads = 0;
};

struct EvaluateArgs {
  std::string manifest;
  std::string config;
  std::string scheme = "kfold";
  std::string report_dir;
  int threads = 0;
};

struct PredictArgs {
  std::string manifest;
  std::string model;
  std::string out;
  int threads = 0;
};

int run_synth(const SynthArgs& args) {
  const auto manifest = mocaprec::generate_dataset(args.spec, args.out_dir, args.threads);
  std::cout << manifest.rows.size() << " trial files written to " << args.out_dir << "\n";
  return kExitOk;
}

int run_train(const TrainArgs& args) {
  const auto config = mocaprec::load_config(args.config);
  const auto manifest = mocaprec::load_manifest(args.manifest);
  if (!manifest.all_labeled())
    mocaprec::raise(mocaprec::Err::BadLabel, "training manifest has unlabeled rows");

  const auto data = mocaprec::load_and_featurize(manifest, config, args.threads);
  const auto trained = mocaprec::train_pipeline(data.features, config, args.threads);
  mocaprec::save_model_json(trained.model, config, args.model_out);

  const std::string board_path =
      args.leaderboard_out.empty() ? args.model_out + ".leaderboard.csv" : args.leaderboard_out;
  std::ostringstream board;
  board << "model,subset_index,cv_accuracy,selected\n";
  for (const auto& entry : trained.leaderboard)
    board << to_string(entry.kind) << ',' << entry.subset_index << ','
          << mocaprec::csv::format_double(entry.cv_accuracy) << ',' << (entry.selected ? 1 : 0)
          << '\n';
  mocaprec::csv::write_file_atomic(board_path, board.str());
  if (!args.selection_out.empty())
    mocaprec::save_selection_report_csv(trained.selection, args.selection_out);

  std::cout << "model written to " << args.model_out << " (" << trained.leaderboard.size()
            << " candidates scored)\n";
  return kExitOk;
}

int run_evaluate(const EvaluateArgs& args) {
  auto config = mocaprec::load_config(args.config);
  const auto manifest = mocaprec::load_manifest(args.manifest);
  const auto report = mocaprec::evaluate(manifest, config, args.scheme, args.threads);
  mocaprec::write_report(report, args.report_dir);
  std::cout << args.scheme << " pooled trial accuracy "
            << mocaprec::csv::format_double(report.pooled_accuracy) << " over "
            << report.confusion.total() << " trials\n";
  return kExitOk;
}

int run_predict(const PredictArgs& args) {
  const auto loaded = mocaprec::load_model_json(args.model);
  const auto manifest = mocaprec::load_manifest(args.manifest);
  const auto rows = mocaprec::predict_manifest(loaded, manifest, args.threads);
  mocaprec::write_predictions_csv(rows, args.out);
  std::cout << rows.size() << " predictions written to " << args.out << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"MoCap activity recognition pipeline"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled dataset");
  synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
  synth_cmd->add_option("--subjects", synth.spec.n_subjects, "number of subjects")
      ->check(CLI::Range(2, 1000));
  synth_cmd->add_option("--classes", synth.spec.n_classes, "number of activity classes")
      ->check(CLI::Range(1, 10));
  synth_cmd->add_option("--trials", synth.spec.trials_per_class, "trials per subject per class")
      ->check(CLI::Range(1, 1000));
  synth_cmd->add_option("--seed", synth.spec.seed, "master seed");
  synth_cmd->add_option("--duration", synth.spec.duration_s, "trial length, seconds")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--rate", synth.spec.sample_rate_hz, "sample rate, Hz")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", synth.spec.noise_std_mm, "coordinate noise std, mm")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--spread", synth.spec.subject_time_scale_spread,
                        "subject tempo spread, fraction")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--gap-fraction", synth.spec.gap_fraction,
                        "fraction of samples to blank per coordinate")
      ->check(CLI::Range(0.0, 0.15));
  synth_cmd->add_option("--threads", synth.threads, "worker threads (0 = hardware)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train the feature-subset voting ensemble");
  train_cmd->add_option("--manifest", train.manifest, "labeled manifest CSV")->required();
  train_cmd->add_option("--config", train.config, "pipeline config file")->required();
  train_cmd->add_option("--model-out", train.model_out, "output model path")->required();
  train_cmd->add_option("--leaderboard-out", train.leaderboard_out,
                        "candidate leaderboard CSV (default: <model-out>.leaderboard.csv)");
  train_cmd->add_option("--selection-out", train.selection_out, "feature selection report CSV");
  train_cmd->add_option("--threads", train.threads, "worker threads (0 = hardware)");

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "cross-validated evaluation");
  eval_cmd->add_option("--manifest", evaluate.manifest, "labeled manifest CSV")->required();
  eval_cmd->add_option("--config", evaluate.config, "pipeline config file")->required();
  eval_cmd->add_option("--scheme", evaluate.scheme, "kfold | loso | loto")
      ->check(CLI::IsMember({"kfold", "loso", "loto"}));
  eval_cmd->add_option("--report", evaluate.report_dir, "report output directory")->required();
  eval_cmd->add_option("--threads", evaluate.threads, "worker threads (0 = hardware)");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "predict labels for a manifest");
  predict_cmd->add_option("--manifest", predict.manifest, "manifest CSV (labels optional)")
      ->required();
  predict_cmd->add_option("--model", predict.model, "trained model file")->required();
  predict_cmd->add_option("--out", predict.out, "predictions CSV path")->required();
  predict_cmd->add_option("--threads", predict.threads, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (train_cmd->parsed()) return run_train(train);
    if (eval_cmd->parsed()) return run_evaluate(evaluate);
    if (predict_cmd->parsed()) return run_predict(predict);
  } catch (const mocaprec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitUsage;
}
