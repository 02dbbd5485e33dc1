#include <CLI11.hpp>
#include <iostream>

#include "blrs/commands.hpp"

int main(int argc, char** argv) {
  using namespace blrs::cli;

  CLI::App app{"Bayesian linear regression with Student-t assumptions (q-EM)"};
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "learn (alpha, beta) and write a model");
  fit_cmd->add_option("--input", fit.input, "training CSV (with header)")->required();
  fit_cmd->add_option("--target", fit.target, "target column name or 0-based index")
      ->required();
  fit_cmd->add_option("--nu", fit.nu, "degrees of freedom, or 'inf'")
      ->capture_default_str();
  fit_cmd->add_option("--solver", fit.solver, "qem or oracle")
      ->check(CLI::IsMember({"qem", "oracle"}))
      ->capture_default_str();
  fit_cmd->add_option("--out,--model", fit.out, "model JSON to write")->required();
  fit_cmd->add_option("--rel-tol", fit.rel_tol)->capture_default_str();
  fit_cmd->add_option("--max-iter", fit.max_iter)->capture_default_str();
  fit_cmd->add_option("--drop", fit.drop, "columns to ignore")->delimiter(',');

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "apply a model to a CSV");
  predict_cmd->add_option("--model", predict.model, "model JSON")->required();
  predict_cmd->add_option("--input", predict.input, "feature CSV (with header)")
      ->required();
  predict_cmd->add_option("--out", predict.out, "predictions CSV")->required();
  predict_cmd->add_option("--target", predict.target,
                          "column to exclude (e.g. the training target)");
  predict_cmd->add_option("--drop", predict.drop, "columns to ignore")->delimiter(',');

  BenchmarkOptions bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "nu sweep over cross-validation folds");
  bench_cmd->add_option("--input", bench.input, "dataset CSV (with header)")->required();
  bench_cmd->add_option("--target", bench.target)->required();
  bench_cmd->add_option("--nus", bench.nus, "comma-separated nu values")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--folds", bench.folds)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--trial", bench.trial, "1-based held-out fold; 0 = all")
      ->capture_default_str();
  bench_cmd->add_option("--rel-tol", bench.rel_tol)->capture_default_str();
  bench_cmd->add_option("--max-iter", bench.max_iter)->capture_default_str();
  bench_cmd->add_option("--drop", bench.drop, "columns to ignore")->delimiter(',');

  SyntheticOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "write a synthetic regression CSV");
  gen_cmd->add_option("--rows", gen.rows, "sample count m")->required();
  gen_cmd->add_option("--features", gen.features, "feature count M")->required();
  gen_cmd->add_option("--alpha", gen.alpha, "weight precision")->capture_default_str();
  gen_cmd->add_option("--beta", gen.beta, "noise precision")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->required();
  gen_cmd->add_option("--out", gen.out, "CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitDataError;
  }

  if (*fit_cmd) return run_fit(fit, std::cout, std::cerr);
  if (*predict_cmd) return run_predict(predict, std::cout, std::cerr);
  if (*bench_cmd) return run_benchmark(bench, std::cout, std::cerr);
  return run_gen_synthetic(gen, std::cout, std::cerr);
}
